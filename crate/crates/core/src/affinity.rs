//! Restriction of a connectivity kernel to the elements of a stimulus.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::kernels::{eval_unchecked, KernelGrid, KernelKind};
use crate::stimuli::Stimulus;

/// Dense symmetric nonnegative matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    values: Vec<f64>,
    /// Digest of the kernel parameters the entries came from, if any.
    pub kernel_digest: Option<u64>,
    pub stimulus_digest: Option<u64>,
}

impl AffinityMatrix {
    /// Wraps `n * n` row-major values, checking they are finite,
    /// nonnegative and exactly symmetric.
    pub fn from_dense(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return invalid(format!("expected {} values for n = {n}, got {}", n * n, values.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return invalid(format!("affinity entries must be finite and nonnegative, found {v}"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return invalid(format!("entry ({i}, {j}) differs from its transpose"));
                }
            }
        }
        Ok(Self {
            n,
            values,
            kernel_digest: None,
            stimulus_digest: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("rows must form a square matrix");
        }
        Self::from_dense(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when every entry is zero: no pair of elements interacts.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `c * A`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_dense(self.n, self.values.iter().map(|v| v * c).collect())
    }

    /// `P A P^T` for the reordering `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return invalid("order length differs from the matrix size");
        }
        let mut values = Vec::with_capacity(self.n * self.n);
        for &i in order {
            for &j in order {
                values.push(self.get(i, j));
            }
        }
        Self::from_dense(self.n, values)
    }

    /// Plain-text dump: `n`, then one row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Pairwise kernel values between the elements of `s`, averaged with the
/// transpose and with a zero diagonal.
pub fn build_affinity(s: &Stimulus, grid: &KernelGrid) -> Result<AffinityMatrix> {
    if grid.mode() != s.mode() {
        return invalid(format!(
            "kernel is {} but the stimulus is {}",
            grid.mode(),
            s.mode()
        ));
    }
    if grid.params.kind == KernelKind::FokkerPlanck && !grid.symmetrized {
        return invalid("a Fokker-Planck kernel must be symmetrized before building affinities");
    }
    let n = s.len();
    let e = s.elements();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| 0.5 * (eval_unchecked(grid, &e[i], &e[j]) + eval_unchecked(grid, &e[j], &e[i])))
                .collect()
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    let mut a = AffinityMatrix::from_dense(n, values)?;
    a.kernel_digest = Some(grid.params.digest());
    a.stimulus_digest = Some(s.digest());
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LiftedPoint, Polarity};
    use crate::kernels::{simulate_kernel, symmetrize, GridSpec, KernelParams};
    use std::f64::consts::FRAC_PI_2;
    use std::sync::OnceLock;

    fn fp_grid() -> &'static KernelGrid {
        static GRID: OnceLock<KernelGrid> = OnceLock::new();
        GRID.get_or_init(|| {
            let params = KernelParams::fokker_planck(40).with_paths(100_000);
            symmetrize(&simulate_kernel(&params, &GridSpec::covering(40.0)).unwrap())
        })
    }

    fn stim(points: &[(f64, f64, f64)]) -> Stimulus {
        let e = points.iter().map(|&(x, y, t)| LiftedPoint::new(x, y, t)).collect();
        Stimulus::new(e, Polarity::Polarized).unwrap()
    }

    #[test]
    fn single_element_is_the_diagonal() {
        let a = build_affinity(&stim(&[(0.0, 0.0, 0.0)]), fp_grid()).unwrap();
        assert_eq!(a.n(), 1);
        assert_eq!(a.get(0, 0), 0.0);
        assert!(a.is_degenerate());
    }

    #[test]
    fn collinear_beats_perpendicular() {
        let col = build_affinity(&stim(&[(0.0, 0.0, 0.0), (5.0, 0.0, 0.0)]), fp_grid()).unwrap();
        let perp = build_affinity(&stim(&[(0.0, 0.0, 0.0), (5.0, 0.0, FRAC_PI_2)]), fp_grid()).unwrap();
        assert!(col.get(0, 1) > perp.get(0, 1), "{} vs {}", col.get(0, 1), perp.get(0, 1));
    }

    #[test]
    fn collinear_affinity_falls_with_distance() {
        let values: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&d| build_affinity(&stim(&[(0.0, 0.0, 0.0), (d, 0.0, 0.0)]), fp_grid()).unwrap().get(0, 1))
            .collect();
        assert!(values.windows(2).all(|w| w[0] >= w[1]), "{values:?}");
        assert!(values[0] > 0.0);
    }

    #[test]
    fn symmetric_with_zero_diagonal() {
        let s = stim(&[(0.0, 0.0, 0.3), (4.0, 1.0, 0.1), (9.0, -2.0, 6.0), (-7.0, 3.0, 2.0)]);
        let a = build_affinity(&s, fp_grid()).unwrap();
        for i in 0..4 {
            assert_eq!(a.get(i, i), 0.0);
            for j in 0..4 {
                assert_eq!(a.get(i, j).to_bits(), a.get(j, i).to_bits());
            }
        }
        assert_eq!(a.kernel_digest, Some(fp_grid().params.digest()));
    }

    #[test]
    fn permutation_conjugates() {
        let s = stim(&[(0.0, 0.0, 0.3), (4.0, 1.0, 0.1), (9.0, -2.0, 6.0), (-7.0, 3.0, 2.0)]);
        let order = [2, 0, 3, 1];
        let a = build_affinity(&s, fp_grid()).unwrap();
        let b = build_affinity(&s.permuted(&order).unwrap(), fp_grid()).unwrap();
        assert_eq!(b.values(), a.permuted(&order).unwrap().values());
    }

    #[test]
    fn mode_and_symmetrization_are_checked() {
        let s = Stimulus::new(vec![LiftedPoint::new(0.0, 0.0, 0.0)], Polarity::Unpolarized).unwrap();
        assert!(build_affinity(&s, fp_grid()).is_err());
        let raw = simulate_kernel(&KernelParams::fokker_planck(5).with_paths(10), &GridSpec::default()).unwrap();
        assert!(build_affinity(&stim(&[(0.0, 0.0, 0.0)]), &raw).is_err());
    }

    #[test]
    fn dense_validation_and_dump() {
        assert!(AffinityMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(AffinityMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(AffinityMatrix::from_rows(&[vec![0.0, 1.0]]).is_err());
        let a = AffinityMatrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        assert_eq!(a.to_text(), "2\n0 0.5\n0.5 0\n");
        assert!((a.frobenius() - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
