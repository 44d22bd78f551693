//! Where a command's stimulus comes from: a file or a named generator.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use segeo::stimuli::{
    gen_angle, gen_contrast_square, gen_curve_line, gen_fhh, gen_kanizsa_bar, gen_kanizsa_square, gen_kanizsa_triangle,
    gen_segments, AngleConfig, ContrastSquareConfig, CurveLineConfig, FhhConfig, KanizsaBarConfig, KanizsaConfig,
    SegmentsConfig,
};
use segeo::{parse_stimulus, Polarity, Stimulus};

pub const GENERATORS: &[&str] = &[
    "fhh",
    "kanizsa-triangle",
    "kanizsa-square",
    "kanizsa-bar",
    "contrast-square",
    "curve-line",
    "segments",
    "angle",
];

#[derive(Args, Debug, Clone)]
#[group(id = "source", required = true, multiple = false)]
pub struct StimulusSource {
    /// Stimulus file (`mode` header, then `x y theta [label]` lines).
    #[arg(long, group = "source")]
    pub stimulus: Option<PathBuf>,

    /// Built-in generator: fhh, kanizsa-triangle, kanizsa-square,
    /// kanizsa-bar, contrast-square, curve-line, segments or angle.
    #[arg(long, group = "source")]
    pub generator: Option<String>,

    #[command(flatten)]
    pub options: GeneratorOptions,
}

/// Knobs shared by the generators; each uses the ones that apply to it.
#[derive(Args, Debug, Clone)]
pub struct GeneratorOptions {
    /// polarized or unpolarized.
    #[arg(long)]
    pub mode: Option<Polarity>,

    /// Seed for randomized stimuli (background placement).
    #[arg(long, default_value_t = 1)]
    pub stimulus_seed: u64,

    /// fhh: turn between successive path elements, degrees.
    #[arg(long)]
    pub angle_step: Option<f64>,

    /// fhh and curve-line: number of background distractors.
    #[arg(long)]
    pub background: Option<usize>,

    /// Kanizsa figures: inward rotation of the mouth edges, degrees.
    #[arg(long)]
    pub mouth_angle: Option<f64>,

    /// curve-line: rotation of every curve element, degrees.
    #[arg(long)]
    pub perturbation: Option<f64>,

    /// angle: change of heading at the vertex, degrees.
    #[arg(long)]
    pub turn: Option<f64>,
}

impl StimulusSource {
    pub fn load(&self) -> Result<Stimulus> {
        match (&self.stimulus, &self.generator) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_stimulus(&text).with_context(|| format!("in {}", path.display()))?)
            }
            (None, Some(name)) => generate(name, &self.options),
            (None, None) => bail!(segeo::Error::InvalidArgument("no stimulus source".into())),
        }
    }
}

fn generate(name: &str, o: &GeneratorOptions) -> Result<Stimulus> {
    let mode = o.mode.unwrap_or(Polarity::Polarized);
    let kanizsa = || {
        let d = KanizsaConfig::default();
        KanizsaConfig {
            mouth_angle: o.mouth_angle.unwrap_or(d.mouth_angle),
            mode,
            ..d
        }
    };
    let s = match name {
        "fhh" => {
            let d = FhhConfig::default();
            gen_fhh(&FhhConfig {
                angle_step: o.angle_step.unwrap_or(d.angle_step),
                n_background: o.background.unwrap_or(d.n_background),
                seed: o.stimulus_seed,
                mode,
                ..d
            })
        }
        "kanizsa-triangle" => gen_kanizsa_triangle(&kanizsa()),
        "kanizsa-square" => gen_kanizsa_square(&kanizsa()),
        "kanizsa-bar" => gen_kanizsa_bar(&KanizsaBarConfig {
            mode,
            ..KanizsaBarConfig::default()
        }),
        "contrast-square" => gen_contrast_square(&ContrastSquareConfig {
            mode,
            ..ContrastSquareConfig::default()
        }),
        "curve-line" => {
            let d = CurveLineConfig::default();
            gen_curve_line(&CurveLineConfig {
                perturbation: o.perturbation.unwrap_or(d.perturbation),
                n_background: o.background.unwrap_or(d.n_background),
                seed: o.stimulus_seed,
                mode,
                ..d
            })
        }
        "segments" => gen_segments(&SegmentsConfig {
            mode,
            ..SegmentsConfig::default()
        }),
        "angle" => {
            let d = AngleConfig::default();
            gen_angle(&AngleConfig {
                turn: o.turn.unwrap_or(d.turn),
                mode,
                ..d
            })
        }
        other => bail!(segeo::Error::InvalidArgument(format!(
            "unknown generator `{other}` (available: {})",
            GENERATORS.join(", ")
        ))),
    };
    Ok(s?)
}
