//! Sub-Riemannian connectivity kernels on SE(2) and spectral extraction of
//! perceptual units from oriented stimuli.
//!
//! The pipeline: simulate a kernel ([`kernels`]), lift a stimulus to
//! oriented elements ([`stimuli`]), restrict the kernel to those elements
//! ([`affinity`]) and read perceptual units off the leading eigenvectors
//! ([`spectral`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affinity;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kernels;
pub mod pipeline;
pub mod render;
pub mod spectral;
pub mod stimuli;
pub mod validation;

pub use affinity::{build_affinity, AffinityMatrix};
pub use error::{Error, Result};
pub use geometry::{
    group_displacement, invert_displacement, wrap_angle, Displacement, LiftedPoint, Polarity, RigidMotion,
    VectorField,
};
pub use kernels::{
    eval_kernel, load_kernel, save_kernel, simulate_kernel, symmetrize, GridSpec, KernelGrid, KernelKind,
    KernelParams,
};
pub use pipeline::{auto_steps, group, group_with, prepare_kernel, GroupOutcome, KernelCache};
pub use render::{render_svg, RenderSpec};
pub use spectral::{
    extract_units, leading_eigenpair, mean_field_evolve, membership, Deflation, ExtractConfig, MeanFieldParams,
    PerceptualUnit, SpectralResult,
};
pub use stimuli::{parse_stimulus, serialize_stimulus, Stimulus};
pub use validation::{facilitation_score, fit_error, region_densities, DensityVector, Rect, RegionPartition};

/// 64-bit FNV-1a, used for stable content digests.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
