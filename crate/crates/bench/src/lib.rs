//! Fixtures shared by the benchmarks.

use segeo::stimuli::{gen_fhh, gen_kanizsa_triangle, FhhConfig, KanizsaConfig};
use segeo::{prepare_kernel, KernelGrid, KernelParams, Stimulus};

/// Paths per benchmark kernel: enough for a realistic grid, few enough to
/// simulate once per run.
pub const BENCH_PATHS: u64 = 100_000;

pub fn triangle() -> Stimulus {
    gen_kanizsa_triangle(&KanizsaConfig::default()).expect("default triangle")
}

/// A path among `n_background` distractors.
pub fn fhh(n_background: usize) -> Stimulus {
    gen_fhh(&FhhConfig {
        n_background,
        field: (200.0, 200.0),
        ..FhhConfig::default()
    })
    .expect("fhh stimulus")
}

pub fn fp_kernel(steps: u64) -> KernelGrid {
    prepare_kernel(&KernelParams::fokker_planck(steps).with_paths(BENCH_PATHS)).expect("kernel")
}
