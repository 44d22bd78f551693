//! Quantitative comparison of kernels with connectivity data: densities
//! over rectangular regions, their mean-square misfit, and the flanker
//! facilitation score.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::geometry::LiftedPoint;
use crate::kernels::{eval_unchecked, KernelGrid};

/// Axis-aligned rectangle `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) || x0 >= x1 || y0 >= y1 {
            return invalid(format!("degenerate rectangle ({x0}, {y0}) - ({x1}, {y1})"));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.x0.max(o.x0) < self.x1.min(o.x1) && self.y0.max(o.y0) < self.y1.min(o.y1)
    }
}

/// Rectangles with pairwise-disjoint interiors.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPartition {
    regions: Vec<Rect>,
}

impl RegionPartition {
    pub fn new(regions: Vec<Rect>) -> Result<Self> {
        if regions.is_empty() {
            return invalid("a partition needs at least one region");
        }
        for (i, a) in regions.iter().enumerate() {
            if let Some(j) = regions[i + 1..].iter().position(|b| a.overlaps(b)) {
                return invalid(format!("regions {i} and {} overlap", i + 1 + j));
            }
        }
        Ok(Self { regions })
    }

    /// `nx` by `ny` equal tiles of `[x0, x1) x [y0, y1)`, row by row from
    /// the bottom.
    pub fn tiles(x0: f64, y0: f64, x1: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return invalid("tile counts must be positive");
        }
        Rect::new(x0, y0, x1, y1)?;
        let (w, h) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
        let mut regions = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let rx1 = if i + 1 == nx { x1 } else { x0 + (i + 1) as f64 * w };
                let ry1 = if j + 1 == ny { y1 } else { y0 + (j + 1) as f64 * h };
                regions.push(Rect::new(x0 + i as f64 * w, y0 + j as f64 * h, rx1, ry1)?);
            }
        }
        Self::new(regions)
    }

    pub fn regions(&self) -> &[Rect] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// One `x0 y0 x1 y1` rectangle per line; `#` comments and blank lines
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut regions = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: idx + 1, message };
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| err(format!("`{t}` is not a number"))))
                .collect::<Result<_>>()?;
            let [x0, y0, x1, y1] = v[..] else {
                return Err(err(format!("expected `x0 y0 x1 y1`, found {} fields", v.len())));
            };
            regions.push(Rect::new(x0, y0, x1, y1).map_err(|e| err(e.to_string()))?);
        }
        Self::new(regions)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.regions {
            let _ = writeln!(out, "{:?} {:?} {:?} {:?}", r.x0, r.y0, r.x1, r.y1);
        }
        out
    }
}

/// Per-region densities with unit Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    /// Normalizes `values`; all-zero input stays zero.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("densities must be a nonempty list of finite nonnegative values");
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(Self(values));
        }
        Ok(Self(values.into_iter().map(|v| v / norm).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mass falling in each region (the first one containing it), normalized.
/// Mass outside every region is ignored.
pub fn region_densities(samples: &[(f64, f64, f64)], partition: &RegionPartition) -> Result<DensityVector> {
    let mut mass = vec![0.0; partition.len()];
    for &(x, y, m) in samples {
        if let Some(k) = partition.regions.iter().position(|r| r.contains(x, y)) {
            mass[k] += m;
        }
    }
    if mass.iter().sum::<f64>() <= 0.0 {
        return Err(Error::DegenerateDensity("no mass inside the partition".into()));
    }
    DensityVector::from_values(mass)
}

/// Root-mean-square difference between two density vectors.
pub fn fit_error(dp: &DensityVector, dt: &DensityVector) -> Result<f64> {
    if dp.len() != dt.len() {
        return invalid(format!("density vectors of length {} and {}", dp.len(), dt.len()));
    }
    let m = dp.len() as f64;
    Ok((dp.0.iter().zip(&dt.0).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / m).sqrt())
}

/// Summed kernel response of `center` to its flankers, each shifted down by
/// the kernel's mean over its support so weakly connected flankers inhibit.
pub fn facilitation_score(center: &LiftedPoint, flankers: &[LiftedPoint], grid: &KernelGrid) -> f64 {
    if flankers.is_empty() {
        return 0.0;
    }
    let mean = grid.support_mean();
    flankers.iter().map(|f| eval_unchecked(grid, center, f) - mean).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_region_mass() {
        let p = RegionPartition::tiles(0.0, 0.0, 5.0, 1.0, 5, 1).unwrap();
        let d = region_densities(&[(2.5, 0.5, 3.0), (9.0, 9.0, 100.0)], &p).unwrap();
        assert_eq!(d.values(), &[0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn uniform_mass_normalizes_to_half() {
        let p = RegionPartition::tiles(0.0, 0.0, 2.0, 2.0, 2, 2).unwrap();
        let samples = [(0.5, 0.5, 1.0), (1.5, 0.5, 1.0), (0.5, 1.5, 1.0), (1.5, 1.5, 1.0)];
        let d = region_densities(&samples, &p).unwrap();
        assert!(d.values().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn empty_partition_mass_is_degenerate() {
        let p = RegionPartition::tiles(0.0, 0.0, 1.0, 1.0, 1, 1).unwrap();
        assert!(matches!(region_densities(&[(5.0, 5.0, 1.0)], &p), Err(Error::DegenerateDensity(_))));
    }

    #[test]
    fn fit_error_examples() {
        let e1 = DensityVector::from_values(vec![1.0, 0.0]).unwrap();
        let e2 = DensityVector::from_values(vec![0.0, 1.0]).unwrap();
        assert_eq!(fit_error(&e1, &e1).unwrap(), 0.0);
        assert!((fit_error(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let e3 = DensityVector::from_values(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(fit_error(&e1, &e3).is_err());
    }

    #[test]
    fn partitions_reject_overlap_and_parse() {
        let a = Rect::new(0.0, 0.0, 2.0, 2.0).unwrap();
        let b = Rect::new(1.0, 1.0, 3.0, 3.0).unwrap();
        let c = Rect::new(2.0, 0.0, 3.0, 1.0).unwrap();
        assert!(RegionPartition::new(vec![a, b]).is_err());
        assert!(RegionPartition::new(vec![a, c]).is_ok());
        assert!(RegionPartition::new(vec![]).is_err());
        assert!(Rect::new(1.0, 0.0, 1.0, 2.0).is_err());

        let p = RegionPartition::parse("# two tiles\n0 0 1 1\n\n1 0 2 1\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(RegionPartition::parse(&p.to_text()).unwrap(), p);
        match RegionPartition::parse("0 0 1 1\n0 0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RegionPartition::parse("0 0 1 x\n"), Err(Error::Parse { line: 1, .. })));
    }
}
