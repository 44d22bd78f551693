//! `segeo`: kernel generation, grouping runs, experiment sweeps,
//! validation and rendering.

mod files;
mod stimulus;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use segeo::experiments::{critical_angle, format_rows, run_experiment, ExperimentConfig};
use segeo::kernels::cone_masses;
use segeo::pipeline::{format_report, CACHE_ENV};
use segeo::{
    auto_steps, facilitation_score, fit_error, group_with, load_kernel, prepare_kernel, region_densities, render_svg,
    save_kernel, Deflation, ExtractConfig, KernelCache, KernelGrid, KernelKind, KernelParams, RegionPartition,
    RenderSpec,
};

use stimulus::StimulusSource;

#[derive(Parser, Debug)]
#[command(name = "segeo", version, about = "Connectivity kernels and spectral perceptual grouping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a kernel and save it.
    Kernel(KernelCmd),
    /// Group a stimulus into perceptual units.
    Group(GroupCmd),
    /// Run a named sweep and print one row per configuration.
    Experiment(ExperimentCmd),
    /// Compare kernels with densities and flanker configurations.
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Draw a stimulus, optionally colored by the units of a report.
    Render(RenderCmd),
}

/// Kernel parameters. The sub-Riemannian and isotropic constants are given
/// as variances per unit step; the Fokker-Planck sigma is a standard
/// deviation.
#[derive(Args, Debug, Clone)]
struct KernelOpts {
    /// fp, srl or iso.
    #[arg(long, default_value = "fp")]
    kind: KernelKind,
    /// Fokker-Planck angular standard deviation [default: 0.15].
    #[arg(long)]
    sigma: Option<f64>,
    /// Sub-Riemannian tangential variance [default: 1.2].
    #[arg(long)]
    sigma1: Option<f64>,
    /// Sub-Riemannian angular variance [default: 0.11].
    #[arg(long)]
    sigma3: Option<f64>,
    /// Isotropic planar variance [default: 0.15].
    #[arg(long)]
    sigma_iso: Option<f64>,
    /// Isotropic angular variance [default: 0.15].
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = segeo::kernels::DEFAULT_PATHS)]
    paths: u64,
    #[arg(long, default_value_t = segeo::kernels::DEFAULT_SEED)]
    seed: u64,
}

impl KernelOpts {
    fn params(&self, steps: u64) -> KernelParams {
        let mut p = KernelParams::new(self.kind, steps).with_paths(self.paths).with_seed(self.seed);
        if let Some(v) = self.sigma {
            p.sigma = v;
        }
        for (field, variance) in [
            (&mut p.sigma1, self.sigma1),
            (&mut p.sigma3, self.sigma3),
            (&mut p.sigma_iso, self.sigma_iso),
            (&mut p.rho, self.rho),
        ] {
            if let Some(v) = variance {
                // a negative variance becomes NaN and fails validation
                *field = v.sqrt();
            }
        }
        p
    }
}

#[derive(Args, Debug, Clone)]
struct ExtractOpts {
    /// Membership threshold relative to the largest eigenvector entry.
    #[arg(long, default_value_t = 0.3)]
    threshold: f64,
    /// Stop once saliency falls below this fraction of the first unit's.
    #[arg(long, default_value_t = 0.1)]
    saliency_floor: f64,
    #[arg(long, default_value_t = 10)]
    max_units: usize,
    /// remove or project.
    #[arg(long, default_value = "remove")]
    deflation: Deflation,
}

impl ExtractOpts {
    fn config(&self) -> ExtractConfig {
        ExtractConfig {
            rel_threshold: self.threshold,
            saliency_floor: self.saliency_floor,
            max_units: self.max_units,
            deflation: self.deflation,
            ..ExtractConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct KernelCmd {
    #[command(flatten)]
    kernel: KernelOpts,
    /// Path length H in unit steps.
    #[arg(long)]
    steps: u64,
    /// polarized or unpolarized.
    #[arg(long, default_value = "polarized")]
    mode: segeo::Polarity,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GroupCmd {
    #[command(flatten)]
    source: StimulusSource,
    #[command(flatten)]
    kernel: KernelOpts,
    /// Path length H; a third of the largest inducer distance when omitted.
    #[arg(long)]
    steps: Option<u64>,
    /// Use a saved kernel instead of simulating one.
    #[arg(long, conflicts_with = "steps")]
    kernel_file: Option<PathBuf>,
    /// Directory caching simulated kernels.
    #[arg(long, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    extract: ExtractOpts,
    /// Eigenvalues listed in the report.
    #[arg(long, default_value_t = 5)]
    eigenvalues: usize,
    /// Report destination; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also draw the units to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentCmd {
    /// fhh-sweep, square-sweep, swap, fp-vs-srl, isotropic, polarity or triangle.
    name: String,
    #[arg(long, default_value_t = segeo::kernels::DEFAULT_PATHS)]
    paths: u64,
    #[arg(long, default_value_t = segeo::kernels::DEFAULT_SEED)]
    kernel_seed: u64,
    /// Stimulus seeds averaged over by randomized sweeps.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    #[arg(long, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    extract: ExtractOpts,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ValidateCmd {
    /// Fit error between two independently seeded kernels.
    SelfFit {
        #[command(flatten)]
        kernel: KernelOpts,
        #[arg(long, default_value_t = 30)]
        steps: u64,
        /// Seed of the second kernel [default: seed + 1].
        #[arg(long)]
        other_seed: Option<u64>,
        /// Tiles per side of the square partition.
        #[arg(long, default_value_t = 10)]
        tiles: usize,
    },
    /// Facilitation score of each flanker set in a configuration file.
    Facilitation {
        /// Lines `<set> x y theta`, plus an optional `center x y theta`.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        kernel: KernelOpts,
        #[arg(long, default_value_t = 30)]
        steps: u64,
    },
    /// Grid search over Fokker-Planck parameters against a target density.
    Sweep {
        /// Target mass points, `x y mass` per line.
        #[arg(long)]
        density: PathBuf,
        /// Regions, `x0 y0 x1 y1` per line.
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sigmas: Vec<f64>,
        #[arg(long = "paths", value_delimiter = ',', required = true)]
        path_counts: Vec<u64>,
        #[arg(long = "steps", value_delimiter = ',', required = true)]
        step_counts: Vec<u64>,
        #[arg(long, default_value_t = segeo::kernels::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct RenderCmd {
    #[command(flatten)]
    source: StimulusSource,
    /// Grouping report whose units color the drawing.
    #[arg(long)]
    units: Option<PathBuf>,
    #[arg(long, default_value_t = 4.0)]
    segment_length: f64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn kernel(cmd: KernelCmd) -> Result<()> {
    let params = cmd.kernel.params(cmd.steps).with_mode(cmd.mode);
    let grid = prepare_kernel(&params)?;
    save_kernel(&grid, &cmd.out).with_context(|| format!("writing {}", cmd.out.display()))?;
    let (forward, lateral) = cone_masses(&grid);
    println!("kind {}", params.kind);
    println!("mass {:e}", grid.total_mass());
    println!("forward {forward:e} lateral {lateral:e} ratio {:e}", forward / lateral);
    println!("wrote {}", cmd.out.display());
    Ok(())
}

fn group(cmd: GroupCmd) -> Result<()> {
    let s = cmd.source.load()?;
    let grid = match &cmd.kernel_file {
        Some(path) => {
            let g = load_kernel(path).with_context(|| format!("loading {}", path.display()))?;
            if g.mode() != s.mode() {
                bail!(segeo::Error::InvalidArgument(format!(
                    "kernel is {} but the stimulus is {}",
                    g.mode(),
                    s.mode()
                )));
            }
            std::sync::Arc::new(g)
        }
        None => {
            let steps = cmd.steps.unwrap_or_else(|| auto_steps(&s));
            KernelCache::new(cmd.cache).get(&cmd.kernel.params(steps).with_mode(s.mode()))?
        }
    };
    let outcome = group_with(&s, &grid, &cmd.extract.config())?;
    emit(cmd.out.as_deref(), &format_report(&outcome, cmd.eigenvalues))?;
    if let Some(path) = &cmd.svg {
        let svg = render_svg(&s, &outcome.units, &RenderSpec::default())?;
        std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn experiment(cmd: ExperimentCmd) -> Result<()> {
    let cfg = ExperimentConfig {
        n_paths: cmd.paths,
        kernel_seed: cmd.kernel_seed,
        seeds: cmd.seeds,
        extract: cmd.extract.config(),
    };
    let rows = run_experiment(&cmd.name, &cfg, &KernelCache::new(cmd.cache))?;
    let mut text = format_rows(&rows);
    if cmd.name == "square-sweep" {
        match critical_angle(&rows) {
            Some(a) => text.push_str(&format!("# critical mouth angle {a}\n")),
            None => text.push_str("# no single critical mouth angle\n"),
        }
    }
    emit(cmd.out.as_deref(), &text)
}

fn simulate(kernel: &KernelOpts, steps: u64) -> Result<KernelGrid> {
    Ok(prepare_kernel(&kernel.params(steps))?)
}

fn validate(cmd: ValidateCmd) -> Result<()> {
    match cmd {
        ValidateCmd::SelfFit {
            kernel,
            steps,
            other_seed,
            tiles,
        } => {
            let a = simulate(&kernel, steps)?;
            let other = KernelOpts {
                seed: other_seed.unwrap_or(kernel.seed + 1),
                ..kernel.clone()
            };
            let b = simulate(&other, steps)?;
            let h = a.spec.half_x;
            let partition = RegionPartition::tiles(-h, -h, h, h, tiles, tiles)?;
            let e = fit_error(
                &region_densities(&a.xy_marginal(), &partition)?,
                &region_densities(&b.xy_marginal(), &partition)?,
            )?;
            println!("seeds {} {} regions {} E {e:.6}", kernel.seed, other.seed, partition.len());
        }
        ValidateCmd::Facilitation { config, kernel, steps } => {
            let sets = files::parse_flankers(&read(&config)?)?;
            let grid = simulate(&kernel, steps)?;
            println!("set\tflankers\tscore");
            for (name, flankers) in &sets.sets {
                let score = facilitation_score(&sets.center, flankers, &grid);
                println!("{name}\t{}\t{score:e}", flankers.len());
            }
        }
        ValidateCmd::Sweep {
            density,
            partition,
            sigmas,
            path_counts,
            step_counts,
            seed,
        } => {
            let partition = RegionPartition::parse(&read(&partition)?)?;
            let target = region_densities(&files::parse_density(&read(&density)?)?, &partition)?;
            let mut best: Option<(f64, String)> = None;
            println!("sigma\tpaths\tsteps\tE");
            for &sigma in &sigmas {
                for &paths in &path_counts {
                    for &steps in &step_counts {
                        let params = KernelParams::fokker_planck(steps)
                            .with_sigma(sigma)
                            .with_paths(paths)
                            .with_seed(seed);
                        let grid = prepare_kernel(&params)?;
                        let e = fit_error(&region_densities(&grid.xy_marginal(), &partition)?, &target)?;
                        let row = format!("{sigma}\t{paths}\t{steps}\t{e:.6}");
                        println!("{row}");
                        if best.as_ref().is_none_or(|(b, _)| e < *b) {
                            best = Some((e, row));
                        }
                    }
                }
            }
            if let Some((_, row)) = best {
                println!("# best {row}");
            }
        }
    }
    Ok(())
}

fn render(cmd: RenderCmd) -> Result<()> {
    let s = cmd.source.load()?;
    let units = match &cmd.units {
        Some(path) => files::parse_units(&read(path)?)?,
        None => Vec::new(),
    };
    let spec = RenderSpec {
        segment_length: cmd.segment_length,
        ..RenderSpec::default()
    };
    emit(cmd.out.as_deref(), &render_svg(&s, &units, &spec)?)
}

/// Exit status for a failed run: 2 when the input was at fault, as for
/// argument errors, 1 otherwise.
fn failure_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<segeo::Error>(),
            Some(segeo::Error::InvalidArgument(_) | segeo::Error::Validation(_) | segeo::Error::Parse { .. })
        )
    });
    if usage {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernel(c) => kernel(c),
        Command::Group(c) => group(c),
        Command::Experiment(c) => experiment(c),
        Command::Validate(c) => validate(c),
        Command::Render(c) => render(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(failure_code(&err))
        }
    }
}
