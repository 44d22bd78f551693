//! The grouping pipeline: choose a kernel for a stimulus, build the
//! affinity matrix and extract perceptual units, with kernels cached in
//! memory and optionally on disk.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::affinity::{build_affinity, AffinityMatrix};
use crate::error::Result;
use crate::kernels::{load_kernel, save_kernel, simulate_kernel, symmetrize, GridSpec, KernelGrid, KernelKind, KernelParams};
use crate::spectral::{eigen_decomposition, extract_units, ExtractConfig, PerceptualUnit};
use crate::stimuli::Stimulus;

/// Environment variable naming a default kernel cache directory.
pub const CACHE_ENV: &str = "SEGEO_KERNEL_CACHE";

/// Path length `H` tied to the figure size: a third of the largest
/// distance between inducing elements, at least one step.
pub fn auto_steps(s: &Stimulus) -> u64 {
    ((s.max_inducer_distance() / 3.0).round() as u64).max(1)
}

/// Simulates a kernel on a grid covering its reach, symmetrizing
/// Fokker-Planck kernels; the other kinds are symmetric in law already.
pub fn prepare_kernel(params: &KernelParams) -> Result<KernelGrid> {
    let grid = simulate_kernel(params, &GridSpec::covering(params.reach()))?;
    Ok(match params.kind {
        KernelKind::FokkerPlanck => symmetrize(&grid),
        _ => grid,
    })
}

/// Kernels keyed by their parameters, kept for the life of the cache and
/// mirrored to `dir` when one is set.
#[derive(Debug, Default)]
pub struct KernelCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<u64, Arc<KernelGrid>>>,
}

impl KernelCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self {
            dir,
            memory: Mutex::default(),
        }
    }

    /// Uses the directory named by `SEGEO_KERNEL_CACHE`, if set.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn file_for(&self, params: &KernelParams) -> Option<PathBuf> {
        let name = format!("{}-{:016x}.sgk", params.kind.short_name(), params.digest());
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn get(&self, params: &KernelParams) -> Result<Arc<KernelGrid>> {
        let key = params.digest();
        if let Some(g) = self.memory.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(g));
        }
        let file = self.file_for(params);
        let from_disk = file
            .as_ref()
            .filter(|f| f.exists())
            .and_then(|f| load_kernel(f).ok())
            .filter(|g| g.params == *params);
        let grid = match from_disk {
            Some(g) => g,
            None => {
                let g = prepare_kernel(params)?;
                if let Some(f) = &file {
                    std::fs::create_dir_all(f.parent().expect("cache file has a parent"))?;
                    // write then rename so concurrent readers never see a partial file
                    let tmp = f.with_extension(format!("tmp{}", std::process::id()));
                    save_kernel(&g, &tmp)?;
                    std::fs::rename(&tmp, f)?;
                }
                g
            }
        };
        let grid = Arc::new(grid);
        self.memory.lock().expect("cache lock").insert(key, Arc::clone(&grid));
        Ok(grid)
    }
}

/// Everything one grouping run produces.
#[derive(Clone, Debug)]
pub struct GroupOutcome {
    pub params: KernelParams,
    pub affinity: AffinityMatrix,
    pub units: Vec<PerceptualUnit>,
    /// Full spectrum, descending.
    pub eigenvalues: Vec<f64>,
}

impl GroupOutcome {
    pub fn first(&self) -> Option<&PerceptualUnit> {
        self.units.first()
    }

    /// Second-largest eigenvalue, zero for a single element.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).copied().unwrap_or(0.0)
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Affinity, spectrum and units of `s` under `grid`.
pub fn group_with(s: &Stimulus, grid: &KernelGrid, extract: &ExtractConfig) -> Result<GroupOutcome> {
    let affinity = build_affinity(s, grid)?;
    let units = extract_units(&affinity, extract)?;
    let eigenvalues = eigen_decomposition(&affinity)?.eigenvalues;
    Ok(GroupOutcome {
        params: grid.params,
        affinity,
        units,
        eigenvalues,
    })
}

/// Runs the pipeline with `template` as kernel parameters; its step count
/// is replaced by [`auto_steps`] when `auto_h` is set.
pub fn group(
    s: &Stimulus,
    template: &KernelParams,
    auto_h: bool,
    extract: &ExtractConfig,
    cache: &KernelCache,
) -> Result<GroupOutcome> {
    let mut params = template.with_mode(s.mode());
    if auto_h {
        params.steps = auto_steps(s);
    }
    let grid = cache.get(&params)?;
    group_with(s, &grid, extract)
}

/// Line-oriented report: one `unit` line per unit, then the leading
/// eigenvalues.
pub fn format_report(outcome: &GroupOutcome, max_eigenvalues: usize) -> String {
    let mut out = String::new();
    for u in &outcome.units {
        let members: Vec<String> = u.members.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "unit {} saliency {:e} members {}", u.rank, u.saliency, members.join(","));
    }
    let eig: Vec<String> = outcome.eigenvalues.iter().take(max_eigenvalues).map(|v| format!("{v:e}")).collect();
    let _ = writeln!(out, "eigenvalues {}", eig.join(" "));
    out
}

/// Share of `target` found in `members`.
pub fn recall(members: &[usize], target: &[usize]) -> f64 {
    if target.is_empty() {
        return 0.0;
    }
    target.iter().filter(|t| members.contains(t)).count() as f64 / target.len() as f64
}

/// Share of `members` that belong to `target`.
pub fn precision(members: &[usize], target: &[usize]) -> f64 {
    if members.is_empty() {
        return 0.0;
    }
    members.iter().filter(|m| target.contains(m)).count() as f64 / members.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LiftedPoint, Polarity};

    #[test]
    fn auto_steps_uses_a_third_of_the_span() {
        let e = vec![LiftedPoint::new(0.0, 0.0, 0.0), LiftedPoint::new(31.0, 0.0, 0.0)];
        let s = Stimulus::new(e, Polarity::Polarized).unwrap();
        assert_eq!(auto_steps(&s), 10);
        let one = Stimulus::new(vec![LiftedPoint::new(0.0, 0.0, 0.0)], Polarity::Polarized).unwrap();
        assert_eq!(auto_steps(&one), 1);
    }

    #[test]
    fn recall_and_precision() {
        assert_eq!(recall(&[1, 2, 3], &[2, 3, 4, 5]), 0.5);
        assert_eq!(precision(&[1, 2, 3, 4], &[2, 3]), 0.5);
        assert_eq!(recall(&[], &[]), 0.0);
        assert_eq!(precision(&[], &[1]), 0.0);
    }

    #[test]
    fn cache_reuses_memory_and_disk() {
        let dir = tempfile::tempdir().unwrap();
        let params = KernelParams::fokker_planck(6).with_paths(500);
        let cache = KernelCache::new(Some(dir.path().to_path_buf()));
        let a = cache.get(&params).unwrap();
        let b = cache.get(&params).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(a.symmetrized);
        let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let fresh = KernelCache::new(Some(dir.path().to_path_buf()));
        assert_eq!(*fresh.get(&params).unwrap(), *a);
    }

    #[test]
    fn report_lines() {
        let e = vec![LiftedPoint::new(0.0, 0.0, 0.0), LiftedPoint::new(3.0, 0.0, 0.0)];
        let s = Stimulus::new(e, Polarity::Polarized).unwrap();
        let params = KernelParams::fokker_planck(6).with_paths(2000);
        let cache = KernelCache::default();
        let out = group(&s, &params, false, &ExtractConfig::default(), &cache).unwrap();
        let text = format_report(&out, 5);
        assert!(text.starts_with("unit 1 saliency "), "{text}");
        assert!(text.contains("members 0,1\n"), "{text}");
        assert!(text.lines().last().unwrap().starts_with("eigenvalues "));
    }
}
