//! Illusory-contour figures built from pacman and C-shaped inducers.
//!
//! Orientations follow the inducer boundary with the dark inducer body on
//! the left, so in polarized mode the two mouth edges facing each other
//! across an illusory side point the same way.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{push, Stimulus};
use crate::error::{invalid, Result};
use crate::geometry::{LiftedPoint, Polarity};

#[derive(Clone, Debug, PartialEq)]
pub struct KanizsaConfig {
    /// Distance between neighbouring inducer centers.
    pub side: f64,
    pub inducer_radius: f64,
    /// Rotation of every mouth edge toward the figure interior, in degrees.
    pub mouth_angle: f64,
    pub elements_per_edge: usize,
    /// Whole-inducer rotation in degrees, alternating in sign.
    pub rotation_jitter: f64,
    /// Spacing of elements along the inducer rims; `None` leaves rims out.
    pub arc_gap: Option<f64>,
    pub mode: Polarity,
}

impl Default for KanizsaConfig {
    fn default() -> Self {
        Self {
            side: 60.0,
            inducer_radius: 25.0,
            mouth_angle: 0.0,
            elements_per_edge: 4,
            rotation_jitter: 0.0,
            arc_gap: None,
            mode: Polarity::Polarized,
        }
    }
}

/// Four pacmen at the corners of a square.
pub fn gen_kanizsa_square(cfg: &KanizsaConfig) -> Result<Stimulus> {
    polygon(4, cfg)
}

/// Three pacmen at the corners of an upright equilateral triangle.
pub fn gen_kanizsa_triangle(cfg: &KanizsaConfig) -> Result<Stimulus> {
    polygon(3, cfg)
}

fn polygon(k: usize, cfg: &KanizsaConfig) -> Result<Stimulus> {
    let r = cfg.inducer_radius;
    let n = cfg.elements_per_edge;
    let alpha = cfg.mouth_angle.to_radians();
    let interior = PI - TAU / k as f64;
    let finite = [cfg.side, r, alpha, cfg.rotation_jitter].iter().all(|v| v.is_finite());
    if !finite || r <= 0.0 || n == 0 {
        return invalid("inducers need a positive radius and at least one element per edge");
    }
    if cfg.side <= 2.0 * r {
        return invalid(format!("side {} leaves no gap between inducers of radius {r}", cfg.side));
    }
    if alpha.abs() >= interior / 2.0 - 1e-12 {
        return invalid(format!(
            "mouth angle {} closes the mouth (limit {})",
            cfg.mouth_angle,
            (interior / 2.0).to_degrees()
        ));
    }
    if let Some(g) = cfg.arc_gap {
        if !(g > 0.0 && g.is_finite()) {
            return invalid("arc gap must be positive");
        }
    }

    let circumradius = cfg.side / (2.0 * (PI / k as f64).sin());
    let start = if k.is_multiple_of(2) { FRAC_PI_2 - PI / k as f64 } else { FRAC_PI_2 };
    let vertex = |i: usize| {
        let a = start + TAU * (i % k) as f64 / k as f64;
        (circumradius * a.cos(), circumradius * a.sin())
    };

    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for i in 0..k {
        let (vx, vy) = vertex(i);
        let (nx, ny) = vertex(i + 1);
        let (px, py) = vertex(i + k - 1);
        let jitter = cfg.rotation_jitter.to_radians() * if i % 2 == 0 { 1.0 } else { -1.0 };
        // the mouth opens counterclockwise from edge a (toward the next
        // vertex) to edge b (toward the previous one)
        let phi_a = (ny - vy).atan2(nx - vx) + alpha + jitter;
        let phi_b = (py - vy).atan2(px - vx) - alpha + jitter;
        pacman(
            &mut elements,
            &mut labels,
            i,
            (vx, vy),
            r,
            n,
            (phi_a, phi_b),
            cfg.arc_gap,
        );
    }
    Stimulus::labeled(elements, labels, cfg.mode)
}

#[allow(clippy::too_many_arguments)]
fn pacman(
    elements: &mut Vec<LiftedPoint>,
    labels: &mut Vec<String>,
    index: usize,
    (cx, cy): (f64, f64),
    r: f64,
    n: usize,
    (phi_a, phi_b): (f64, f64),
    arc_gap: Option<f64>,
) {
    let at = |phi: f64, rho: f64, theta: f64| LiftedPoint::new(cx + rho * phi.cos(), cy + rho * phi.sin(), theta);
    for j in 0..n {
        let rho = r * (j as f64 + 0.5) / n as f64;
        // edge a is walked inward, edge b outward
        push(elements, labels, at(phi_a, rho, phi_a + PI), format!("inducer-{index}-a"));
    }
    for j in 0..n {
        let rho = r * (j as f64 + 0.5) / n as f64;
        push(elements, labels, at(phi_b, rho, phi_b), format!("inducer-{index}-b"));
    }
    if let Some(gap) = arc_gap {
        let mouth = (phi_b - phi_a).rem_euclid(TAU);
        let span = TAU - mouth;
        let m = ((span * r / gap).round() as usize).max(1);
        for j in 0..m {
            let phi = phi_b + span * (j as f64 + 0.5) / m as f64;
            push(elements, labels, at(phi, r, phi + FRAC_PI_2), format!("arc-{index}"));
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KanizsaBarConfig {
    /// Distance between the two inducer centers.
    pub length: f64,
    pub inducer_radius: f64,
    /// Half the height of the notch cut into each inducer.
    pub half_width: f64,
    /// Vertical shift of the right inducer.
    pub offset: f64,
    pub elements_per_edge: usize,
    /// Spacing of rim and notch-wall elements; `None` leaves them out.
    pub arc_gap: Option<f64>,
    pub mode: Polarity,
}

impl Default for KanizsaBarConfig {
    fn default() -> Self {
        Self {
            length: 60.0,
            inducer_radius: 25.0,
            half_width: 6.0,
            offset: 0.0,
            elements_per_edge: 4,
            arc_gap: None,
            mode: Polarity::Polarized,
        }
    }
}

/// Two C-shaped inducers facing each other across a horizontal bar. Edge
/// `a` is the upper notch edge of each inducer, edge `b` the lower one.
pub fn gen_kanizsa_bar(cfg: &KanizsaBarConfig) -> Result<Stimulus> {
    let (r, h, n) = (cfg.inducer_radius, cfg.half_width, cfg.elements_per_edge);
    let finite = [cfg.length, r, h, cfg.offset].iter().all(|v| v.is_finite());
    if !finite || n == 0 || r <= 0.0 || h <= 0.0 || h >= r {
        return invalid("the notch must be narrower than a positive inducer radius");
    }
    if cfg.length <= 2.0 * r {
        return invalid(format!("length {} leaves no gap between inducers of radius {r}", cfg.length));
    }
    if let Some(g) = cfg.arc_gap {
        if !(g > 0.0 && g.is_finite()) {
            return invalid("arc gap must be positive");
        }
    }

    // the left inducer opens toward +x; the right one is its half-turn image
    let depth = (r * r - h * h).sqrt();
    let mut left: Vec<(LiftedPoint, &str)> = Vec::new();
    for j in 0..n {
        let x = depth * (j as f64 + 0.5) / n as f64;
        left.push((LiftedPoint::new(x, h, 0.0), "a"));
    }
    for j in 0..n {
        let x = depth * (j as f64 + 0.5) / n as f64;
        left.push((LiftedPoint::new(x, -h, PI), "b"));
    }
    if let Some(gap) = cfg.arc_gap {
        let m = ((2.0 * h / gap).round() as usize).max(1);
        for j in 0..m {
            let y = -h + 2.0 * h * (j as f64 + 0.5) / m as f64;
            left.push((LiftedPoint::new(0.0, y, FRAC_PI_2), "wall"));
        }
        let open = (h / r).asin();
        let span = TAU - 2.0 * open;
        let m = ((span * r / gap).round() as usize).max(1);
        for j in 0..m {
            let phi = open + span * (j as f64 + 0.5) / m as f64;
            left.push((LiftedPoint::new(r * phi.cos(), r * phi.sin(), phi + FRAC_PI_2), "arc"));
        }
    }

    let mut elements = Vec::new();
    let mut labels = Vec::new();
    let half = cfg.length / 2.0;
    for (p, part) in &left {
        let p = LiftedPoint::new(p.x - half, p.y, p.theta);
        push(&mut elements, &mut labels, p, part_label(0, part));
    }
    for (p, part) in &left {
        let p = LiftedPoint::new(half - p.x, cfg.offset - p.y, p.theta + PI);
        let part = match *part {
            "a" => "b",
            "b" => "a",
            other => other,
        };
        push(&mut elements, &mut labels, p, part_label(1, part));
    }
    Stimulus::labeled(elements, labels, cfg.mode)
}

fn part_label(index: usize, part: &str) -> String {
    match part {
        "a" | "b" => format!("inducer-{index}-{part}"),
        other => format!("{other}-{index}"),
    }
}
