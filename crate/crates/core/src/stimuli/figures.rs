//! Smaller figures: the two-contrast square, a curve beside a line,
//! collinear segments and a bent chain.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fhh::scatter;
use super::{push, Stimulus};
use crate::error::{invalid, Result};
use crate::geometry::{LiftedPoint, Polarity};

#[derive(Clone, Debug, PartialEq)]
pub struct ContrastSquareConfig {
    pub side: f64,
    pub element_gap: f64,
    pub semicircle_radius: f64,
    pub mode: Polarity,
}

impl Default for ContrastSquareConfig {
    fn default() -> Self {
        Self {
            side: 60.0,
            element_gap: 6.0,
            semicircle_radius: 15.0,
            mode: Polarity::Polarized,
        }
    }
}

/// A square, black on the left and white on the right, whose dividing line
/// bulges into the white half as a semicircle.
///
/// Emits the top edge (`upper-black` over the black half, `upper-white`
/// over the white half) and the bulge (`semicircle`). With the darker side
/// kept on the left, the two halves of the top edge point in opposite
/// directions.
pub fn gen_contrast_square(cfg: &ContrastSquareConfig) -> Result<Stimulus> {
    let (s, g, r) = (cfg.side, cfg.element_gap, cfg.semicircle_radius);
    if !(s > 0.0 && g > 0.0 && r > 0.0) || !(s + g + r).is_finite() {
        return invalid("side, gap and radius must be positive");
    }
    if r >= s / 2.0 {
        return invalid("the semicircle must fit inside the square");
    }
    let mut elements = Vec::new();
    let mut labels = Vec::new();

    // an even count keeps the divider between two elements
    let n = (((s / g).round() as usize).max(2) + 1) & !1;
    for k in 0..n {
        let x = -s / 2.0 + s * (k as f64 + 0.5) / n as f64;
        if x < 0.0 {
            push(&mut elements, &mut labels, LiftedPoint::new(x, s / 2.0, PI), "upper-black");
        } else {
            push(&mut elements, &mut labels, LiftedPoint::new(x, s / 2.0, 0.0), "upper-white");
        }
    }
    let m = ((PI * r / g).round() as usize).max(1);
    for j in 0..m {
        let phi = -FRAC_PI_2 + PI * (j as f64 + 0.5) / m as f64;
        let p = LiftedPoint::new(r * phi.cos(), r * phi.sin(), phi + FRAC_PI_2);
        push(&mut elements, &mut labels, p, "semicircle");
    }
    Stimulus::labeled(elements, labels, cfg.mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveLineConfig {
    pub n_curve: usize,
    pub curve_radius: f64,
    pub n_line: usize,
    pub element_gap: f64,
    /// Alternating orientation offset of curve elements, in degrees.
    pub perturbation: f64,
    pub n_background: usize,
    pub field: (f64, f64),
    pub min_sep: f64,
    pub seed: u64,
    pub mode: Polarity,
}

impl Default for CurveLineConfig {
    fn default() -> Self {
        Self {
            n_curve: 12,
            curve_radius: 120.0,
            n_line: 4,
            element_gap: 5.0,
            perturbation: 0.0,
            n_background: 0,
            field: (120.0, 100.0),
            min_sep: 4.0,
            seed: 1,
            mode: Polarity::Polarized,
        }
    }
}

/// A gently curved chain (`curve`) above a straight one (`line`), with
/// optional distractors. The perturbation rotates curve elements by
/// `+perturbation, -perturbation, ...` without moving them.
pub fn gen_curve_line(cfg: &CurveLineConfig) -> Result<Stimulus> {
    let (w, h) = cfg.field;
    if cfg.n_curve == 0 || cfg.n_line == 0 {
        return invalid("both chains need at least one element");
    }
    let ok = cfg.curve_radius > 0.0 && cfg.element_gap > 0.0 && w > 0.0 && h > 0.0;
    let finite = [cfg.curve_radius, cfg.element_gap, cfg.perturbation, cfg.min_sep, w, h]
        .iter()
        .all(|v| v.is_finite());
    if !ok || !finite {
        return invalid("curve and line geometry must be positive and finite");
    }
    let delta = cfg.perturbation.to_radians();
    let mut elements = Vec::new();
    let mut labels = Vec::new();

    let top = h / 4.0;
    let r = cfg.curve_radius;
    for j in 0..cfg.n_curve {
        let psi = (j as f64 - (cfg.n_curve - 1) as f64 / 2.0) * cfg.element_gap / r;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let p = LiftedPoint::new(r * psi.sin(), top - r + r * psi.cos(), -psi + sign * delta);
        push(&mut elements, &mut labels, p, "curve");
    }
    for j in 0..cfg.n_line {
        let x = (j as f64 - (cfg.n_line - 1) as f64 / 2.0) * cfg.element_gap;
        push(&mut elements, &mut labels, LiftedPoint::new(x, -h / 4.0, 0.0), "line");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    scatter(&mut rng, &mut elements, &mut labels, cfg.n_background, cfg.field, cfg.min_sep, cfg.mode)?;
    Stimulus::labeled(elements, labels, cfg.mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentsConfig {
    /// Element count of each segment, left to right.
    pub lengths: Vec<usize>,
    pub element_gap: f64,
    /// Distance between the last element of a segment and the first of
    /// the next.
    pub segment_gap: f64,
    pub mode: Polarity,
}

impl Default for SegmentsConfig {
    fn default() -> Self {
        Self {
            lengths: vec![12, 11],
            element_gap: 5.0,
            segment_gap: 15.0,
            mode: Polarity::Polarized,
        }
    }
}

/// Collinear segments along the x axis, centered on the origin and
/// labeled `segment-<k>`.
pub fn gen_segments(cfg: &SegmentsConfig) -> Result<Stimulus> {
    if cfg.lengths.is_empty() || cfg.lengths.contains(&0) {
        return invalid("every segment needs at least one element");
    }
    if !(cfg.element_gap > 0.0 && cfg.segment_gap > 0.0 && (cfg.element_gap + cfg.segment_gap).is_finite()) {
        return invalid("gaps must be positive");
    }
    let mut xs = Vec::new();
    let mut labels = Vec::new();
    let mut x = 0.0;
    for (k, &n) in cfg.lengths.iter().enumerate() {
        if k > 0 {
            x += cfg.segment_gap - cfg.element_gap;
        }
        for _ in 0..n {
            xs.push(x);
            labels.push(format!("segment-{k}"));
            x += cfg.element_gap;
        }
    }
    let mid = (xs[0] + xs[xs.len() - 1]) / 2.0;
    let elements = xs.into_iter().map(|x| LiftedPoint::new(x - mid, 0.0, 0.0)).collect();
    Stimulus::labeled(elements, labels, cfg.mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleConfig {
    pub arm_a: usize,
    pub arm_b: usize,
    pub element_gap: f64,
    /// Change of heading at the vertex, in degrees.
    pub turn: f64,
    pub mode: Polarity,
}

impl Default for AngleConfig {
    fn default() -> Self {
        Self {
            arm_a: 8,
            arm_b: 7,
            element_gap: 5.0,
            turn: 90.0,
            mode: Polarity::Polarized,
        }
    }
}

/// A chain running along `arm-b` into a vertex at the origin and leaving
/// along `arm-a` (heading 0) after turning by `turn`.
pub fn gen_angle(cfg: &AngleConfig) -> Result<Stimulus> {
    if cfg.arm_a == 0 || cfg.arm_b == 0 {
        return invalid("both arms need at least one element");
    }
    if !(cfg.element_gap > 0.0 && cfg.element_gap.is_finite() && cfg.turn.is_finite()) {
        return invalid("gap must be positive and turn finite");
    }
    let inbound = -cfg.turn.to_radians();
    let (sin, cos) = inbound.sin_cos();
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for j in (0..cfg.arm_b).rev() {
        let d = (j as f64 + 0.5) * cfg.element_gap;
        push(&mut elements, &mut labels, LiftedPoint::new(-d * cos, -d * sin, inbound), "arm-b");
    }
    for j in 0..cfg.arm_a {
        let d = (j as f64 + 0.5) * cfg.element_gap;
        push(&mut elements, &mut labels, LiftedPoint::new(d, 0.0, 0.0), "arm-a");
    }
    Stimulus::labeled(elements, labels, cfg.mode)
}
