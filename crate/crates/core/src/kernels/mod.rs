//! Connectivity kernels estimated as time-integrated densities of random
//! paths on SE(2), stored as 3-D histograms over group displacements.

mod io;
mod simulate;

use std::fmt;
use std::str::FromStr;

pub use io::{load_kernel, read_kernel, save_kernel, write_kernel, FORMAT_VERSION, MAGIC};
pub use simulate::simulate_kernel;

use crate::error::{invalid, Error, Result};
use crate::geometry::{group_displacement, invert_displacement, Displacement, LiftedPoint, Polarity};

/// Which diffusion generates the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Deterministic advance along X1, angular diffusion along X2.
    FokkerPlanck,
    /// Random signed advance along X1, angular diffusion along X2.
    SubRiemannianLaplacian,
    /// Independent planar and angular diffusion.
    IsotropicLaplacian,
}

impl KernelKind {
    pub fn short_name(self) -> &'static str {
        match self {
            KernelKind::FokkerPlanck => "fp",
            KernelKind::SubRiemannianLaplacian => "srl",
            KernelKind::IsotropicLaplacian => "iso",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            KernelKind::FokkerPlanck => 0,
            KernelKind::SubRiemannianLaplacian => 1,
            KernelKind::IsotropicLaplacian => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(KernelKind::FokkerPlanck),
            1 => Some(KernelKind::SubRiemannianLaplacian),
            2 => Some(KernelKind::IsotropicLaplacian),
            _ => None,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            KernelKind::FokkerPlanck => "FokkerPlanck",
            KernelKind::SubRiemannianLaplacian => "SubRiemannianLaplacian",
            KernelKind::IsotropicLaplacian => "IsotropicLaplacian",
        };
        f.write_str(name)
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fp" | "fokker-planck" | "fokkerplanck" => Ok(KernelKind::FokkerPlanck),
            "srl" | "sub-riemannian" | "subriemannianlaplacian" => Ok(KernelKind::SubRiemannianLaplacian),
            "iso" | "isotropic" | "isotropiclaplacian" => Ok(KernelKind::IsotropicLaplacian),
            other => invalid(format!("unknown kernel kind `{other}` (expected fp, srl or iso)")),
        }
    }
}

/// Parameters of the discretized stochastic system.
///
/// Only the standard deviations relevant to `kind` are used. Stochastic
/// increments scale with `sqrt(step)`, the drift of the Fokker-Planck walk
/// with `step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub kind: KernelKind,
    /// Angular diffusion of the Fokker-Planck walk (radians per unit step).
    pub sigma: f64,
    /// Tangential diffusion of the sub-Riemannian walk (pixels per unit step).
    pub sigma1: f64,
    /// Angular diffusion of the sub-Riemannian walk.
    pub sigma3: f64,
    /// Planar diffusion of the isotropic walk.
    pub sigma_iso: f64,
    /// Angular diffusion of the isotropic walk.
    pub rho: f64,
    pub n_paths: u64,
    /// Steps per path (`H`).
    pub steps: u64,
    /// Arc length per step (`Delta s`), pixels.
    pub step: f64,
    pub seed: u64,
    pub mode: Polarity,
}

pub const DEFAULT_PATHS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 7;
const ISO_VARIANCE: f64 = 0.15;
const SRL_VARIANCES: (f64, f64) = (1.2, 0.11);

impl KernelParams {
    pub fn new(kind: KernelKind, steps: u64) -> Self {
        Self {
            kind,
            sigma: 0.15,
            // the sub-Riemannian and isotropic constants are variances
            sigma1: SRL_VARIANCES.0.sqrt(),
            sigma3: SRL_VARIANCES.1.sqrt(),
            sigma_iso: ISO_VARIANCE.sqrt(),
            rho: ISO_VARIANCE.sqrt(),
            n_paths: DEFAULT_PATHS,
            steps,
            step: 1.0,
            seed: DEFAULT_SEED,
            mode: Polarity::Polarized,
        }
    }

    pub fn fokker_planck(steps: u64) -> Self {
        Self::new(KernelKind::FokkerPlanck, steps)
    }

    pub fn sub_riemannian(steps: u64) -> Self {
        Self::new(KernelKind::SubRiemannianLaplacian, steps)
    }

    pub fn isotropic(steps: u64) -> Self {
        Self::new(KernelKind::IsotropicLaplacian, steps)
    }

    pub fn with_paths(mut self, n_paths: u64) -> Self {
        self.n_paths = n_paths;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: Polarity) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// Longest planar distance a deterministic-speed path can cover.
    pub fn reach(&self) -> f64 {
        self.steps as f64 * self.step
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return invalid("n_paths must be at least 1");
        }
        if self.steps == 0 {
            return invalid("steps must be at least 1");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return invalid(format!("step must be positive, got {}", self.step));
        }
        for (name, v) in [
            ("sigma", self.sigma),
            ("sigma1", self.sigma1),
            ("sigma3", self.sigma3),
            ("sigma_iso", self.sigma_iso),
            ("rho", self.rho),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be a finite non-negative number, got {v}"));
            }
        }
        Ok(())
    }

    pub(crate) fn to_bytes(self) -> Vec<u8> {
        let mut out = Vec::with_capacity(80);
        for v in [self.sigma, self.sigma1, self.sigma3, self.sigma_iso, self.rho] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.n_paths.to_le_bytes());
        out.extend_from_slice(&self.steps.to_le_bytes());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out
    }

    /// Stable 64-bit fingerprint of every field.
    pub fn digest(&self) -> u64 {
        let mut bytes = vec![self.kind.code(), self.mode.code()];
        bytes.extend(self.to_bytes());
        crate::fnv1a(&bytes)
    }
}

/// Bin layout of a kernel histogram.
///
/// Planar bins tile `[-half_x, half_x] x [-half_y, half_y]`; with odd counts
/// the central bin is centered on the pole. Angular bins are centered on
/// `-period/2 + k * period / ntheta`, so an even `ntheta` puts a bin center
/// at zero offset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub ntheta: usize,
    pub half_x: f64,
    pub half_y: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nx: 101,
            ny: 101,
            ntheta: 64,
            half_x: 50.0,
            half_y: 50.0,
        }
    }
}

impl GridSpec {
    /// Smallest grid with roughly unit planar bins that holds every state
    /// a path of length `reach` can visit; never smaller than the default.
    pub fn covering(reach: f64) -> Self {
        let default = Self::default();
        if reach < default.half_x - 1.0 {
            return default;
        }
        let half = reach.ceil() + 1.0;
        let n = 2 * half as usize + 1;
        Self {
            nx: n,
            ny: n,
            ntheta: default.ntheta,
            half_x: half,
            half_y: half,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, mode: Polarity) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.ntheta == 0 {
            return invalid(format!("zero-sized grid {}x{}x{}", self.nx, self.ny, self.ntheta));
        }
        if !(self.half_x > 0.0 && self.half_y > 0.0 && self.half_x.is_finite() && self.half_y.is_finite()) {
            return invalid(format!("grid extent must be positive, got ({}, {})", self.half_x, self.half_y));
        }
        if mode == Polarity::Unpolarized && !self.ntheta.is_multiple_of(2) {
            return invalid("unpolarized kernels need an even number of angular bins");
        }
        Ok(())
    }

    pub fn bin_width_x(&self) -> f64 {
        2.0 * self.half_x / self.nx as f64
    }

    pub fn bin_width_y(&self) -> f64 {
        2.0 * self.half_y / self.ny as f64
    }
}

/// A kernel histogram over displacements `(dx, dy, dtheta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGrid {
    pub spec: GridSpec,
    /// Angular period tiled by the `ntheta` bins (`2pi` or `pi`).
    pub period: f64,
    /// Densities in x-major order: `((ix * ny) + iy) * ntheta + ik`.
    pub values: Vec<f64>,
    pub params: KernelParams,
    pub symmetrized: bool,
}

impl KernelGrid {
    pub fn mode(&self) -> Polarity {
        self.params.mode
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, ik: usize) -> usize {
        (ix * self.spec.ny + iy) * self.spec.ntheta + ik
    }

    pub fn bin_width_theta(&self) -> f64 {
        self.period / self.spec.ntheta as f64
    }

    pub fn bin_volume(&self) -> f64 {
        self.spec.bin_width_x() * self.spec.bin_width_y() * self.bin_width_theta()
    }

    /// Displacement at the center of bin `(ix, iy, ik)`.
    pub fn bin_center(&self, ix: usize, iy: usize, ik: usize) -> Displacement {
        let s = &self.spec;
        Displacement {
            dx: -s.half_x + (ix as f64 + 0.5) * s.bin_width_x(),
            dy: -s.half_y + (iy as f64 + 0.5) * s.bin_width_y(),
            dtheta: -0.5 * self.period + ik as f64 * self.bin_width_theta(),
        }
    }

    /// Integral of the density over the grid.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_volume()
    }

    /// Mean density over bins with positive value.
    pub fn support_mean(&self) -> f64 {
        let (sum, n) = self
            .values
            .iter()
            .filter(|v| **v > 0.0)
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Planar marginal as `(x, y, mass)` triples at bin centers.
    pub fn xy_marginal(&self) -> Vec<(f64, f64, f64)> {
        let s = &self.spec;
        let vol = self.bin_volume();
        let mut out = Vec::with_capacity(s.nx * s.ny);
        for ix in 0..s.nx {
            for iy in 0..s.ny {
                let start = self.index(ix, iy, 0);
                let mass: f64 = self.values[start..start + s.ntheta].iter().sum::<f64>() * vol;
                let c = self.bin_center(ix, iy, 0);
                out.push((c.dx, c.dy, mass));
            }
        }
        out
    }

    /// Trilinear interpolation at `d`, cyclic in the angle and zero outside
    /// the planar extent.
    pub fn interpolate(&self, d: &Displacement) -> f64 {
        let s = &self.spec;
        if !(d.dx.abs() <= s.half_x && d.dy.abs() <= s.half_y) {
            return 0.0;
        }
        let fx = (d.dx + s.half_x) / s.bin_width_x() - 0.5;
        let fy = (d.dy + s.half_y) / s.bin_width_y() - 0.5;
        let wt = self.bin_width_theta();
        let ft = (d.dtheta + 0.5 * self.period) / wt;

        let x0 = fx.floor();
        let y0 = fy.floor();
        let t0 = ft.floor();
        let (tx, ty, tt) = (fx - x0, fy - y0, ft - t0);
        let n = s.ntheta as i64;
        let k0 = (t0 as i64).rem_euclid(n) as usize;
        let k1 = (t0 as i64 + 1).rem_euclid(n) as usize;

        let mut acc = 0.0;
        for (ix, wx) in [(x0 as i64, 1.0 - tx), (x0 as i64 + 1, tx)] {
            if wx == 0.0 || ix < 0 || ix >= s.nx as i64 {
                continue;
            }
            for (iy, wy) in [(y0 as i64, 1.0 - ty), (y0 as i64 + 1, ty)] {
                if wy == 0.0 || iy < 0 || iy >= s.ny as i64 {
                    continue;
                }
                let base = self.index(ix as usize, iy as usize, 0);
                let v = (1.0 - tt) * self.values[base + k0] + tt * self.values[base + k1];
                acc += wx * wy * v;
            }
        }
        acc
    }
}

/// `values'(d) = (values(d) + values(d^-1)) / 2`, the inverse evaluated by
/// interpolation. Already-symmetrized grids are returned unchanged.
pub fn symmetrize(grid: &KernelGrid) -> KernelGrid {
    if grid.symmetrized {
        return grid.clone();
    }
    let s = grid.spec;
    let mode = grid.mode();
    let mut values = vec![0.0; grid.values.len()];
    for ix in 0..s.nx {
        for iy in 0..s.ny {
            for ik in 0..s.ntheta {
                let d = grid.bin_center(ix, iy, ik);
                let inv = invert_displacement(&d, mode);
                let i = grid.index(ix, iy, ik);
                values[i] = 0.5 * (grid.values[i] + grid.interpolate(&inv));
            }
        }
    }
    KernelGrid {
        values,
        symmetrized: true,
        ..grid.clone()
    }
}

/// Kernel value between two lifted points.
///
/// On a symmetrized grid the value is averaged over both orderings so the
/// result is exactly symmetric in `p` and `q`.
pub fn eval_kernel(grid: &KernelGrid, p: &LiftedPoint, q: &LiftedPoint, mode: Polarity) -> Result<f64> {
    if mode != grid.mode() {
        return invalid(format!("kernel is {} but evaluation requested in {} mode", grid.mode(), mode));
    }
    Ok(eval_unchecked(grid, p, q))
}

pub(crate) fn eval_unchecked(grid: &KernelGrid, p: &LiftedPoint, q: &LiftedPoint) -> f64 {
    let mode = grid.mode();
    let d = group_displacement(p, q, mode);
    if grid.symmetrized {
        let back = group_displacement(q, p, mode);
        0.5 * (grid.interpolate(&d) + grid.interpolate(&back))
    } else {
        grid.interpolate(&d)
    }
}

/// Ratio of mass in the forward cone `|atan2(dy, dx)| < pi/8` to mass in
/// the lateral cone `|atan2(dy, dx) - pi/2| < pi/8`.
pub fn cone_masses(grid: &KernelGrid) -> (f64, f64) {
    let cone = std::f64::consts::PI / 8.0;
    let mut forward = 0.0;
    let mut lateral = 0.0;
    for (x, y, m) in grid.xy_marginal() {
        if x == 0.0 && y == 0.0 {
            continue;
        }
        let a = y.atan2(x);
        if a.abs() < cone {
            forward += m;
        }
        if (a - std::f64::consts::FRAC_PI_2).abs() < cone {
            lateral += m;
        }
    }
    (forward, lateral)
}
