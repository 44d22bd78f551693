//! Eigen-analysis of affinity matrices: saliency ranking, extraction of
//! perceptual units and the mean-field activity dynamics.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::affinity::AffinityMatrix;
use crate::error::{invalid, Error, Result};

/// Largest size solved by a full dense decomposition.
pub const DENSE_LIMIT: usize = 512;
/// Relative gap under which two eigenvalues count as equal.
pub const DEGENERACY_GAP: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-9;

const POWER_MAX_ITER: usize = 200_000;

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// Another eigenvalue lies within the degeneracy gap of `value`, so
    /// the vector is one arbitrary choice from a larger eigenspace.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerceptualUnit {
    /// Zero-based element indices, ascending.
    pub members: Vec<usize>,
    pub saliency: f64,
    /// Extraction order, starting at 1.
    pub rank: usize,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Deflation {
    /// Zero the rows and columns of the unit's members.
    #[default]
    Remove,
    /// Project onto the orthogonal complement of the unit's eigenvector.
    Project,
}

impl std::str::FromStr for Deflation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remove" => Ok(Deflation::Remove),
            "project" => Ok(Deflation::Project),
            other => invalid(format!("unknown deflation `{other}` (expected remove or project)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractConfig {
    pub rel_threshold: f64,
    /// Stop once the saliency drops below this fraction of the first.
    pub saliency_floor: f64,
    pub max_units: usize,
    pub deflation: Deflation,
    pub tol: f64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            rel_threshold: 0.3,
            saliency_floor: 0.1,
            max_units: 10,
            deflation: Deflation::Remove,
            tol: DEFAULT_TOL,
        }
    }
}

/// Flips `v` so its largest-magnitude component (the first, on ties) is
/// positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full symmetric decomposition.
pub fn eigen_decomposition(a: &AffinityMatrix) -> Result<SpectralResult> {
    dense_eigen(a.values(), a.n())
}

fn dense_eigen(values: &[f64], n: usize) -> Result<SpectralResult> {
    let m = DMatrix::from_row_slice(n, n, values);
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 100_000).ok_or(Error::Convergence {
        iterations: 100_000,
        residual: f64::NAN,
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Algebraically largest eigenvalue with a unit eigenvector.
///
/// The matrix is split into the connected components of its nonzero
/// pattern and each component is solved on its own, so the returned vector
/// is supported on a single component. When components tie, the one
/// holding the lowest index wins and the pair is flagged degenerate.
pub fn leading_eigenpair(a: &AffinityMatrix, tol: f64) -> Result<LeadingPair> {
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    leading_raw(a.values(), a.n(), tol)
}

fn leading_raw(values: &[f64], n: usize, tol: f64) -> Result<LeadingPair> {
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let frob = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(LeadingPair {
            value: 0.0,
            vector: e1,
            degenerate: true,
        });
    }

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    let mut tied = false;
    for comp in components(values, n) {
        let k = comp.len();
        let mut sub = Vec::with_capacity(k * k);
        for &i in &comp {
            for &j in &comp {
                sub.push(values[i * n + j]);
            }
        }
        let (value, local, inner_tie) = if k <= DENSE_LIMIT {
            let r = dense_eigen(&sub, k)?;
            let tie = k > 1 && r.eigenvalues[0] - r.eigenvalues[1] <= DEGENERACY_GAP * r.eigenvalues[0].abs();
            (r.eigenvalues[0], r.eigenvectors.into_iter().next().unwrap(), tie)
        } else {
            let (value, v) = power_iteration(&sub, k, tol)?;
            (value, v, false)
        };
        let mut vector = vec![0.0; n];
        for (&i, &x) in comp.iter().zip(&local) {
            vector[i] = x;
        }
        match &best {
            None => best = Some((value, vector, inner_tie)),
            Some((b, _, _)) => {
                let scale = b.abs().max(value.abs());
                if (value - b).abs() <= DEGENERACY_GAP * scale {
                    tied = true;
                } else if value > *b {
                    tied = false;
                    best = Some((value, vector, inner_tie));
                }
            }
        }
    }
    let (value, vector, inner_tie) = best.expect("at least one component");
    let pair = LeadingPair {
        value,
        vector,
        degenerate: tied || inner_tie,
    };
    let residual = residual(values, n, &pair.vector, pair.value);
    if residual > tol * frob {
        return Err(Error::Convergence { iterations: 0, residual });
    }
    Ok(pair)
}

/// Connected components of the nonzero pattern, each listed in ascending
/// order and the list ordered by smallest member.
fn components(values: &[f64], n: usize) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[start] = id;
        let mut stack = vec![start];
        let mut members = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && values[i * n + j] != 0.0 {
                    comp[j] = id;
                    stack.push(j);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn mat_vec(values: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    values.chunks_exact(n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(values: &[f64], n: usize, v: &[f64], lambda: f64) -> f64 {
    let av = mat_vec(values, n, v);
    av.iter().zip(v).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt()
}

/// Shifted power iteration; the shift by the largest absolute row sum makes
/// the algebraically largest eigenvalue dominant.
fn power_iteration(values: &[f64], n: usize, tol: f64) -> Result<(f64, Vec<f64>)> {
    let shift = values
        .chunks_exact(n)
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let frob = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut res = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        let av = mat_vec(values, n, &v);
        let lambda: f64 = av.iter().zip(&v).map(|(a, b)| a * b).sum();
        res = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt();
        if res <= tol * frob {
            fix_sign(&mut v);
            return Ok((lambda, v));
        }
        let mut next: Vec<f64> = av.iter().zip(&v).map(|(a, x)| a + shift * x).collect();
        let nn = norm(&next);
        next.iter_mut().for_each(|x| *x /= nn);
        v = next;
    }
    Err(Error::Convergence {
        iterations: POWER_MAX_ITER,
        residual: res,
    })
}

/// Indices whose component magnitude reaches `rel_threshold` times the
/// largest magnitude.
pub fn membership(v: &[f64], rel_threshold: f64) -> Result<Vec<usize>> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return invalid(format!("threshold {rel_threshold} outside (0, 1)"));
    }
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return Ok(Vec::new());
    }
    Ok(v
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() >= rel_threshold * max)
        .map(|(i, _)| i)
        .collect())
}

/// Repeatedly takes the leading eigenvector as a unit and deflates it,
/// until the saliency falls below the floor or `max_units` are found.
pub fn extract_units(a: &AffinityMatrix, cfg: &ExtractConfig) -> Result<Vec<PerceptualUnit>> {
    if !(cfg.saliency_floor > 0.0) || cfg.max_units == 0 {
        return invalid("stop rule needs a positive floor and unit count");
    }
    if !(cfg.tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let n = a.n();
    let mut m = a.values().to_vec();
    let mut units: Vec<PerceptualUnit> = Vec::new();
    let mut first = None;
    while units.len() < cfg.max_units {
        let pair = leading_raw(&m, n, cfg.tol)?;
        if !(pair.value > 0.0) {
            break;
        }
        let first = *first.get_or_insert(pair.value);
        if pair.value < cfg.saliency_floor * first {
            break;
        }
        let members = membership(&pair.vector, cfg.rel_threshold)?;
        match cfg.deflation {
            Deflation::Remove => {
                for &i in &members {
                    for j in 0..n {
                        m[i * n + j] = 0.0;
                        m[j * n + i] = 0.0;
                    }
                }
            }
            Deflation::Project => project_out(&mut m, n, &pair.vector),
        }
        units.push(PerceptualUnit {
            members,
            saliency: pair.value,
            rank: units.len() + 1,
            degenerate: pair.degenerate,
        });
    }
    Ok(units)
}

/// `M <- (I - v v^T) M (I - v v^T)`, kept exactly symmetric.
fn project_out(m: &mut [f64], n: usize, v: &[f64]) {
    let mv = mat_vec(m, n, v);
    let vmv: f64 = mv.iter().zip(v).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in i..n {
            let x = m[i * n + j] - v[i] * mv[j] - mv[i] * v[j] + vmv * v[i] * v[j];
            m[i * n + j] = x;
            m[j * n + i] = x;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldParams {
    pub lambda_decay: f64,
    pub slope: f64,
    pub saturation: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl Default for MeanFieldParams {
    fn default() -> Self {
        Self {
            lambda_decay: 1.0,
            slope: 1.0,
            saturation: 1.0,
            dt: 0.01,
            n_steps: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFieldState {
    pub activity: Vec<f64>,
    /// `max |du/dt|` at the last step.
    pub residual: f64,
}

/// Bound on `max |u|` past which integration is declared unstable.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Explicit Euler integration of `du/dt = -lambda u + s(A u)` with
/// `s(x) = saturation * tanh(slope * x / saturation)`.
pub fn mean_field_evolve(a: &AffinityMatrix, u0: &[f64], p: &MeanFieldParams) -> Result<MeanFieldState> {
    let n = a.n();
    if u0.len() != n {
        return invalid(format!("initial state has {} entries for a {n}x{n} matrix", u0.len()));
    }
    if !(p.dt > 0.0 && p.lambda_decay > 0.0 && p.saturation > 0.0 && p.slope.is_finite()) {
        return invalid("dt, decay and saturation must be positive");
    }
    let s = |x: f64| p.saturation * (p.slope * x / p.saturation).tanh();
    let mut u = u0.to_vec();
    let mut residual = 0.0;
    for step in 1..=p.n_steps {
        let au = mat_vec(a.values(), n, &u);
        residual = 0.0f64;
        for (ui, ai) in u.iter_mut().zip(&au) {
            let du = -p.lambda_decay * *ui + s(*ai);
            residual = residual.max(du.abs());
            *ui += p.dt * du;
        }
        let size = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !size.is_finite() || size > DIVERGENCE_GUARD {
            return Err(Error::Instability { step, norm: size });
        }
    }
    Ok(MeanFieldState { activity: u, residual })
}

/// `|<u, v>| / (|u| |v|)`, zero for a zero vector.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs() / (nu * nv)
}
