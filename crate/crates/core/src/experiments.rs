//! Named sweeps over stimulus families, one result row per configuration.
//!
//! Every sweep is deterministic: stimulus seeds and the kernel seed are
//! fixed by [`ExperimentConfig`].

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Polarity;
use crate::kernels::{KernelParams, DEFAULT_PATHS, DEFAULT_SEED};
use crate::pipeline::{group, precision, recall, GroupOutcome, KernelCache};
use crate::spectral::ExtractConfig;
use crate::stimuli::{
    gen_angle, gen_contrast_square, gen_curve_line, gen_fhh, gen_kanizsa_square, gen_kanizsa_triangle, gen_segments,
    inducer_of, is_mouth_edge, AngleConfig, ContrastSquareConfig, CurveLineConfig, FhhConfig, KanizsaConfig,
    SegmentsConfig, Stimulus,
};

/// Names accepted by [`run_experiment`].
pub const EXPERIMENTS: &[&str] = &[
    "fhh-sweep",
    "square-sweep",
    "swap",
    "fp-vs-srl",
    "isotropic",
    "polarity",
    "triangle",
];

pub const FHH_ANGLES: [f64; 5] = [15.0, 30.0, 45.0, 60.0, 90.0];

/// Mouth angles of the square sweep. The mouth closes at 45 degrees, so
/// the grid tightens toward that end.
pub const SQUARE_ANGLES: [f64; 15] = [
    0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 41.0, 42.0, 42.5, 43.0, 43.5, 44.0,
];

/// Curve-element rotation of the perturbed curve-line pair (pi/18).
pub const SWAP_PERTURBATION: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Monte-Carlo paths per kernel.
    pub n_paths: u64,
    pub kernel_seed: u64,
    /// Stimulus seeds; randomized stimuli are averaged over them.
    pub seeds: Vec<u64>,
    pub extract: ExtractConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_paths: DEFAULT_PATHS,
            kernel_seed: DEFAULT_SEED,
            seeds: (1..=5).collect(),
            extract: ExtractConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn kernel(&self, template: KernelParams) -> KernelParams {
        template.with_paths(self.n_paths).with_seed(self.kernel_seed)
    }

    fn fp(&self) -> KernelParams {
        self.kernel(KernelParams::fokker_planck(1))
    }

    fn srl(&self) -> KernelParams {
        self.kernel(KernelParams::sub_riemannian(1))
    }

    fn iso(&self) -> KernelParams {
        self.kernel(KernelParams::isotropic(1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    /// Configuration as `key=value` pairs.
    pub config: Vec<(String, String)>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Unit-1 recall and precision against the row's target elements.
    pub recall: f64,
    pub precision: f64,
    /// What unit 1 is, in the terms of the experiment.
    pub outcome: String,
    /// Inducers touched by unit 1, when the stimulus has any.
    pub inducers: Vec<usize>,
    /// The outcome differs from the previous row's.
    pub swap: bool,
}

impl ExperimentRow {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// One grouping run scored against `target`.
#[derive(Clone, Debug)]
pub struct Scored {
    pub outcome: GroupOutcome,
    pub members: Vec<usize>,
    pub recall: f64,
    pub precision: f64,
}

/// Groups `s` with auto-H and scores unit 1 against `target`.
pub fn score(
    s: &Stimulus,
    template: &KernelParams,
    target: &[usize],
    cfg: &ExperimentConfig,
    cache: &KernelCache,
) -> Result<Scored> {
    let outcome = group(s, template, true, &cfg.extract, cache)?;
    let members = outcome.first().map(|u| u.members.clone()).unwrap_or_default();
    Ok(Scored {
        recall: recall(&members, target),
        precision: precision(&members, target),
        members,
        outcome,
    })
}

/// Sorted distinct inducers among `members`.
pub fn inducers_of(s: &Stimulus, members: &[usize]) -> Vec<usize> {
    let mut k: Vec<usize> = members.iter().filter_map(|&i| s.label(i).and_then(inducer_of)).collect();
    k.sort_unstable();
    k.dedup();
    k
}

/// Sorted distinct labels among `members`.
pub fn labels_of(s: &Stimulus, members: &[usize]) -> Vec<String> {
    let mut l: Vec<String> = members.iter().filter_map(|&i| s.label(i)).map(String::from).collect();
    l.sort();
    l.dedup();
    l
}

fn row(config: &[(&str, String)], scored: &Scored, outcome: String, inducers: Vec<usize>) -> ExperimentRow {
    ExperimentRow {
        config: config.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        lambda1: scored.outcome.lambda1(),
        lambda2: scored.outcome.lambda2(),
        recall: scored.recall,
        precision: scored.precision,
        outcome,
        inducers,
        swap: false,
    }
}

fn mark_swaps(rows: &mut [ExperimentRow]) {
    for i in 1..rows.len() {
        rows[i].swap = rows[i].outcome != rows[i - 1].outcome;
    }
}

pub fn run_experiment(name: &str, cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    let mut rows = match name {
        "fhh-sweep" => fhh_sweep(&FHH_ANGLES, cfg, cache)?,
        "square-sweep" => square_sweep(&SQUARE_ANGLES, Polarity::Unpolarized, cfg, cache)?,
        "swap" => swap(cfg, cache)?,
        "fp-vs-srl" => fp_vs_srl(cfg, cache)?,
        "isotropic" => isotropic(cfg, cache)?,
        "polarity" => polarity(cfg, cache)?,
        "triangle" => triangle(cfg, cache)?,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown experiment `{name}`; available: {}",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    mark_swaps(&mut rows);
    Ok(rows)
}

/// Snake-in-noise detection per angle step, averaged over the seeds.
/// Precision is the path share of unit 1, so `1 - precision` is the
/// background contamination.
pub fn fhh_sweep(angles: &[f64], cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    if cfg.seeds.is_empty() {
        return Err(Error::InvalidArgument("the sweep needs at least one seed".into()));
    }
    let mut rows = Vec::new();
    for &angle in angles {
        let mut acc = [0.0; 4];
        for &seed in &cfg.seeds {
            let s = gen_fhh(&FhhConfig {
                angle_step: angle,
                seed,
                ..FhhConfig::default()
            })?;
            let r = score(&s, &cfg.fp(), &s.indices_labeled("path"), cfg, cache)?;
            for (a, v) in acc.iter_mut().zip([r.outcome.lambda1(), r.outcome.lambda2(), r.recall, r.precision]) {
                *a += v / cfg.seeds.len() as f64;
            }
        }
        rows.push(ExperimentRow {
            config: vec![("angle_step".into(), angle.to_string()), ("seeds".into(), cfg.seeds.len().to_string())],
            lambda1: acc[0],
            lambda2: acc[1],
            recall: acc[2],
            precision: acc[3],
            outcome: if acc[2] >= 0.5 { "path" } else { "background" }.into(),
            inducers: Vec::new(),
            swap: false,
        });
    }
    Ok(rows)
}

fn span_name(inducers: &[usize], total: usize) -> String {
    match inducers.len() {
        0 => "none".into(),
        1 => "single".into(),
        n if n == total => "all".into(),
        _ => "partial".into(),
    }
}

/// Kanizsa square across mouth angles, scored against all mouth edges.
pub fn square_sweep(
    angles: &[f64],
    mode: Polarity,
    cfg: &ExperimentConfig,
    cache: &KernelCache,
) -> Result<Vec<ExperimentRow>> {
    angles
        .iter()
        .map(|&angle| {
            let s = gen_kanizsa_square(&KanizsaConfig {
                mouth_angle: angle,
                mode,
                ..KanizsaConfig::default()
            })?;
            let target = s.indices_where(is_mouth_edge);
            let r = score(&s, &cfg.fp(), &target, cfg, cache)?;
            let ind = inducers_of(&s, &r.members);
            let config = [("mouth_angle", angle.to_string()), ("mode", mode.to_string())];
            Ok(row(&config, &r, span_name(&ind, 4), ind))
        })
        .collect()
}

/// The critical mouth angle: midway between the last angle whose unit 1
/// spans every inducer and the first whose unit 1 lies in one inducer.
/// `None` unless the rows, in increasing angle, switch exactly once.
pub fn critical_angle(rows: &[ExperimentRow]) -> Option<f64> {
    let angle = |r: &ExperimentRow| r.get("mouth_angle").and_then(|v| v.parse::<f64>().ok());
    let split = rows.iter().position(|r| r.outcome != "all")?;
    if split == 0 || rows[split..].iter().any(|r| r.outcome != "single") {
        return None;
    }
    Some((angle(&rows[split - 1])? + angle(&rows[split])?) / 2.0)
}

/// Curve beside a line, with and without the alignment perturbation. The
/// outcome records which chain carries the larger saliency.
pub fn swap(cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    [0.0, SWAP_PERTURBATION]
        .iter()
        .map(|&perturbation| {
            let s = gen_curve_line(&CurveLineConfig {
                perturbation,
                ..CurveLineConfig::default()
            })?;
            let curve = s.indices_labeled("curve");
            let r = score(&s, &cfg.fp(), &curve, cfg, cache)?;
            let (c, l) = chain_saliencies(&s, &r.outcome);
            let outcome = if c >= l { "curve" } else { "line" }.to_string();
            Ok(row(&[("perturbation", perturbation.to_string())], &r, outcome, Vec::new()))
        })
        .collect()
}

/// Saliencies of the units dominated by curve and by line elements (zero
/// when no unit is).
pub fn chain_saliencies(s: &Stimulus, outcome: &GroupOutcome) -> (f64, f64) {
    let of = |label: &str| {
        let target = s.indices_labeled(label);
        outcome
            .units
            .iter()
            .find(|u| precision(&u.members, &target) > 0.5)
            .map_or(0.0, |u| u.saliency)
    };
    (of("curve"), of("line"))
}

/// Collinear segments and a bent chain under both kernels; the outcome
/// says whether unit 1 joins the two parts.
pub fn fp_vs_srl(cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    let figures = [
        ("segments", gen_segments(&SegmentsConfig::default())?),
        ("angle", gen_angle(&AngleConfig::default())?),
    ];
    let mut rows = Vec::new();
    for (name, s) in &figures {
        let all: Vec<usize> = (0..s.len()).collect();
        for (kernel, params) in [("fp", cfg.fp()), ("srl", cfg.srl())] {
            let r = score(s, &params, &all, cfg, cache)?;
            let grouped = labels_of(s, &r.members).len() > 1;
            let outcome = if grouped { "grouped" } else { "split" }.to_string();
            rows.push(row(&[("stimulus", name.to_string()), ("kernel", kernel.into())], &r, outcome, Vec::new()));
        }
    }
    Ok(rows)
}

/// The aligned square under the Fokker-Planck and isotropic kernels.
pub fn isotropic(cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    let s = gen_kanizsa_square(&KanizsaConfig::default())?;
    let target = s.indices_where(is_mouth_edge);
    [("fp", cfg.fp()), ("isotropic", cfg.iso())]
        .iter()
        .map(|(kernel, params)| {
            let r = score(&s, params, &target, cfg, cache)?;
            let ind = inducers_of(&s, &r.members);
            Ok(row(&[("kernel", kernel.to_string())], &r, span_name(&ind, 4), ind))
        })
        .collect()
}

/// The two-contrast square in both polarity modes, scored against the
/// semicircle.
pub fn polarity(cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    [Polarity::Unpolarized, Polarity::Polarized]
        .iter()
        .map(|&mode| {
            let s = gen_contrast_square(&ContrastSquareConfig {
                mode,
                ..ContrastSquareConfig::default()
            })?;
            let r = score(&s, &cfg.fp(), &s.indices_labeled("semicircle"), cfg, cache)?;
            let outcome = labels_of(&s, &r.members).join("+");
            Ok(row(&[("mode", mode.to_string())], &r, outcome, Vec::new()))
        })
        .collect()
}

/// The Kanizsa triangle under both anisotropic kernels.
pub fn triangle(cfg: &ExperimentConfig, cache: &KernelCache) -> Result<Vec<ExperimentRow>> {
    let s = gen_kanizsa_triangle(&KanizsaConfig::default())?;
    let target = s.indices_where(is_mouth_edge);
    [("fp", cfg.fp()), ("srl", cfg.srl())]
        .iter()
        .map(|(kernel, params)| {
            let r = score(&s, params, &target, cfg, cache)?;
            let ind = inducers_of(&s, &r.members);
            let outcome = if r.recall == 1.0 && r.precision == 1.0 { "mouths" } else { "other" }.to_string();
            Ok(row(&[("kernel", kernel.to_string())], &r, outcome, ind))
        })
        .collect()
}

/// Tab-separated table with a header line.
pub fn format_rows(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("config\tlambda1\tlambda2\trecall\tprecision\tswap\toutcome\n");
    for r in rows {
        let config: Vec<String> = r.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "{}\t{:e}\t{:e}\t{:.4}\t{:.4}\t{}\t{}",
            config.join(","),
            r.lambda1,
            r.lambda2,
            r.recall,
            r.precision,
            u8::from(r.swap),
            r.outcome
        );
    }
    out
}
