use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{GridSpec, KernelGrid, KernelKind, KernelParams};
use crate::error::{Error, Result};
use crate::geometry::Polarity;

/// Estimate a time-integrated fundamental solution by Monte-Carlo.
///
/// Every path starts at the pole `(0, 0, 0)` and takes `params.steps`
/// steps; each state after a step adds one passage to its bin. States
/// outside the planar extent are dropped but the path keeps evolving.
/// Counts are divided by `n_paths * steps * bin_volume`.
///
/// Path `k` draws from ChaCha stream `k` keyed by the seed, and passages are
/// integer counts, so the grid is bit-identical for any worker count.
///
/// The walk always runs on the full circle. For unpolarized params the
/// counts are then folded onto the quotient by `pi`, averaging over the
/// contrast of both the source and the target element.
pub fn simulate_kernel(params: &KernelParams, spec: &GridSpec) -> Result<KernelGrid> {
    params.validate()?;
    spec.validate(params.mode)?;

    let sim_spec = match params.mode {
        Polarity::Polarized => *spec,
        Polarity::Unpolarized => GridSpec {
            ntheta: 2 * spec.ntheta,
            ..*spec
        },
    };
    let counts = accumulate(params, &sim_spec);
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::DegenerateKernel(format!(
            "every passage fell outside the +/-({}, {}) extent",
            spec.half_x, spec.half_y
        )));
    }

    let raw: Vec<f64> = match params.mode {
        Polarity::Polarized => counts.iter().map(|&c| c as f64).collect(),
        Polarity::Unpolarized => fold_contrast(&counts, spec),
    };

    let mut grid = KernelGrid {
        spec: *spec,
        period: params.mode.period(),
        values: raw,
        params: *params,
        symmetrized: false,
    };
    let scale = 1.0 / (params.n_paths as f64 * params.steps as f64 * grid.bin_volume());
    grid.values.iter_mut().for_each(|v| *v *= scale);
    Ok(grid)
}

/// Raw passage counts on a polarized grid.
fn accumulate(params: &KernelParams, spec: &GridSpec) -> Vec<u64> {
    let key = ChaCha8Rng::seed_from_u64(params.seed).get_seed();
    let workers = rayon::current_num_threads().max(1) as u64;
    let n = params.n_paths;
    let chunk = n.div_ceil(workers);
    let ranges: Vec<(u64, u64)> = (0..workers)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(n)))
        .filter(|(a, b)| a < b)
        .collect();

    let partials: Vec<Vec<u64>> = ranges
        .into_par_iter()
        .map(|(start, end)| {
            let mut counts = vec![0u64; spec.len()];
            let binner = Binner::new(spec);
            for k in start..end {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(k);
                walk(params, &binner, &mut rng, &mut counts);
            }
            counts
        })
        .collect();

    let mut iter = partials.into_iter();
    let mut total = iter.next().unwrap_or_else(|| vec![0; spec.len()]);
    for part in iter {
        total.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    }
    total
}

struct Binner {
    nx: i64,
    ny: i64,
    nt: i64,
    half_x: f64,
    half_y: f64,
    inv_wx: f64,
    inv_wy: f64,
    inv_wt: f64,
    half_period: f64,
}

impl Binner {
    fn new(spec: &GridSpec) -> Self {
        let period = std::f64::consts::TAU;
        Self {
            nx: spec.nx as i64,
            ny: spec.ny as i64,
            nt: spec.ntheta as i64,
            half_x: spec.half_x,
            half_y: spec.half_y,
            inv_wx: 1.0 / spec.bin_width_x(),
            inv_wy: 1.0 / spec.bin_width_y(),
            inv_wt: spec.ntheta as f64 / period,
            half_period: 0.5 * period,
        }
    }

    #[inline]
    fn bin(&self, x: f64, y: f64, theta: f64) -> Option<usize> {
        let ix = ((x + self.half_x) * self.inv_wx).floor();
        let iy = ((y + self.half_y) * self.inv_wy).floor();
        if !(ix >= 0.0 && iy >= 0.0) {
            return None;
        }
        let (ix, iy) = (ix as i64, iy as i64);
        if ix >= self.nx || iy >= self.ny {
            return None;
        }
        let ik = (((theta + self.half_period) * self.inv_wt).round() as i64).rem_euclid(self.nt);
        Some(((ix * self.ny + iy) * self.nt + ik) as usize)
    }
}

fn walk(params: &KernelParams, binner: &Binner, rng: &mut ChaCha8Rng, counts: &mut [u64]) {
    let ds = params.step;
    let root = ds.sqrt();
    let (mut x, mut y, mut theta) = (0.0f64, 0.0f64, 0.0f64);
    let mut normal = || -> f64 { StandardNormal.sample(rng) };

    for _ in 0..params.steps {
        match params.kind {
            KernelKind::FokkerPlanck => {
                let (s, c) = theta.sin_cos();
                x += ds * c;
                y += ds * s;
                theta += params.sigma * root * normal();
            }
            KernelKind::SubRiemannianLaplacian => {
                let (s, c) = theta.sin_cos();
                let r = params.sigma1 * root * normal();
                x += r * c;
                y += r * s;
                theta += params.sigma3 * root * normal();
            }
            KernelKind::IsotropicLaplacian => {
                x += params.sigma_iso * root * normal();
                y += params.sigma_iso * root * normal();
                theta += params.rho * root * normal();
            }
        }
        if let Some(i) = binner.bin(x, y, theta) {
            counts[i] += 1;
        }
    }
}

/// Fold polarized counts (`2n` angular bins) onto `n` unpolarized bins:
/// `u(p, a) = (c(p, a) + c(p, a + pi) + c(-p, a) + c(-p, a + pi)) / 2`.
fn fold_contrast(counts: &[u64], spec: &GridSpec) -> Vec<f64> {
    let n = spec.ntheta;
    let n2 = 2 * n;
    let idx = |ix: usize, iy: usize, k: usize| (ix * spec.ny + iy) * n2 + k;
    let mut out = vec![0.0; spec.len()];
    for ix in 0..spec.nx {
        let mx = spec.nx - 1 - ix;
        for iy in 0..spec.ny {
            let my = spec.ny - 1 - iy;
            for j in 0..n {
                let k1 = j + n / 2;
                let k2 = (k1 + n) % n2;
                let sum = counts[idx(ix, iy, k1)]
                    + counts[idx(ix, iy, k2)]
                    + counts[idx(mx, my, k1)]
                    + counts[idx(mx, my, k2)];
                out[(ix * spec.ny + iy) * n + j] = 0.5 * sum as f64;
            }
        }
    }
    out
}
