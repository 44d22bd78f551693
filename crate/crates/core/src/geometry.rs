//! Roto-translation group structure on lifted points `(x, y, theta)`.
//!
//! Kernels are left-invariant, so every pairwise evaluation reduces to the
//! displacement of `q` expressed in the moving frame of `p`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Whether orientations carry contrast sign.
///
/// Polarized angles live on `[0, 2pi)`; unpolarized angles are the
/// quotient by `pi` and live on `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Polarized,
    Unpolarized,
}

impl Polarity {
    pub fn period(self) -> f64 {
        match self {
            Polarity::Polarized => TAU,
            Polarity::Unpolarized => PI,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Polarized => "polarized",
            Polarity::Unpolarized => "unpolarized",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Polarity::Polarized => 0,
            Polarity::Unpolarized => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Polarity::Polarized),
            1 => Some(Polarity::Unpolarized),
            _ => None,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polarized" => Ok(Polarity::Polarized),
            "unpolarized" => Ok(Polarity::Unpolarized),
            other => invalid(format!("unknown polarity mode `{other}`")),
        }
    }
}

/// A point of the cortical space R^2 x S^1: the lift of an oriented element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedPoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl LiftedPoint {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    /// Same point with `theta` reduced to the canonical range of `mode`.
    pub fn canonical(self, mode: Polarity) -> Result<Self> {
        if !self.x.is_finite() || !self.y.is_finite() {
            return invalid(format!("non-finite position ({}, {})", self.x, self.y));
        }
        Ok(Self {
            theta: wrap_angle(self.theta, mode)?,
            ..self
        })
    }

    pub fn distance(&self, other: &LiftedPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Offset of one lifted point seen from the frame of another.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Displacement {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl Displacement {
    pub const fn new(dx: f64, dy: f64, dtheta: f64) -> Self {
        Self { dx, dy, dtheta }
    }
}

/// Left-invariant frame fields of SE(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorField {
    /// Tangential direction `(cos theta, sin theta, 0)`.
    X1,
    /// Pure rotation `(0, 0, 1)`.
    X2,
    /// Lateral direction `(-sin theta, cos theta, 0)`.
    X3,
}

impl VectorField {
    pub fn at(self, p: &LiftedPoint) -> [f64; 3] {
        let (s, c) = p.theta.sin_cos();
        match self {
            VectorField::X1 => [c, s, 0.0],
            VectorField::X2 => [0.0, 0.0, 1.0],
            VectorField::X3 => [-s, c, 0.0],
        }
    }
}

/// Reduce `theta` to the canonical range `[0, period)` of `mode`.
pub fn wrap_angle(theta: f64, mode: Polarity) -> Result<f64> {
    if !theta.is_finite() {
        return invalid(format!("non-finite angle {theta}"));
    }
    Ok(wrap_into(theta, mode.period()))
}

fn wrap_into(theta: f64, period: f64) -> f64 {
    let r = theta.rem_euclid(period);
    // rem_euclid of a tiny negative value can round up to `period`.
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Reduce an angle offset to the centered range `[-period/2, period/2)`.
pub fn wrap_centered(dtheta: f64, mode: Polarity) -> f64 {
    let period = mode.period();
    let half = 0.5 * period;
    wrap_into(dtheta + half, period) - half
}

/// Displacement of `q` in the frame attached to `p`.
pub fn group_displacement(p: &LiftedPoint, q: &LiftedPoint, mode: Polarity) -> Displacement {
    let (s, c) = p.theta.sin_cos();
    let ex = q.x - p.x;
    let ey = q.y - p.y;
    Displacement {
        dx: c * ex + s * ey,
        dy: -s * ex + c * ey,
        dtheta: wrap_centered(q.theta - p.theta, mode),
    }
}

/// Group inverse: turns the displacement `p -> q` into `q -> p`.
///
/// In unpolarized mode the angle offset is only known modulo `pi`, so the
/// planar part is determined up to the sign flip `(dx, dy) -> (-dx, -dy)`.
pub fn invert_displacement(d: &Displacement, mode: Polarity) -> Displacement {
    let (s, c) = d.dtheta.sin_cos();
    Displacement {
        dx: -(c * d.dx + s * d.dy),
        dy: -(-s * d.dx + c * d.dy),
        dtheta: wrap_centered(-d.dtheta, mode),
    }
}

/// A rigid motion of the plane acting on lifted points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    pub tx: f64,
    pub ty: f64,
    pub angle: f64,
}

impl RigidMotion {
    pub const fn new(tx: f64, ty: f64, angle: f64) -> Self {
        Self { tx, ty, angle }
    }

    pub fn rotation_about(cx: f64, cy: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            tx: cx - (c * cx - s * cy),
            ty: cy - (s * cx + c * cy),
            angle,
        }
    }

    pub fn apply(&self, p: &LiftedPoint) -> LiftedPoint {
        let (s, c) = self.angle.sin_cos();
        LiftedPoint {
            x: c * p.x - s * p.y + self.tx,
            y: s * p.x + c * p.y + self.ty,
            theta: p.theta + self.angle,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const EPS: f64 = 1e-12;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0, Polarity::Polarized).unwrap(), 0.0);
        assert!(close(wrap_angle(TAU + 0.3, Polarity::Polarized).unwrap(), 0.3, EPS));
        assert!(close(wrap_angle(PI + 0.3, Polarity::Unpolarized).unwrap(), 0.3, EPS));
        assert!(wrap_angle(f64::NAN, Polarity::Polarized).is_err());
        assert!(wrap_angle(f64::INFINITY, Polarity::Unpolarized).is_err());
        let tiny = wrap_angle(-1e-18, Polarity::Polarized).unwrap();
        assert!((0.0..TAU).contains(&tiny));
    }

    #[test]
    fn displacement_examples() {
        let o = LiftedPoint::new(0.0, 0.0, 0.0);
        let d = group_displacement(&o, &o, Polarity::Polarized);
        assert_eq!(d, Displacement::new(0.0, 0.0, 0.0));

        let d = group_displacement(&o, &LiftedPoint::new(1.0, 0.0, 0.0), Polarity::Polarized);
        assert_eq!(d, Displacement::new(1.0, 0.0, 0.0));

        // R(-pi/2) (0, 1) = (1, 0)
        let p = LiftedPoint::new(0.0, 0.0, FRAC_PI_2);
        let q = LiftedPoint::new(0.0, 1.0, FRAC_PI_2);
        let d = group_displacement(&p, &q, Polarity::Polarized);
        assert!(close(d.dx, 1.0, EPS) && close(d.dy, 0.0, EPS) && close(d.dtheta, 0.0, EPS));
    }

    #[test]
    fn inversion_examples() {
        let m = Polarity::Polarized;
        let zero = invert_displacement(&Displacement::new(0.0, 0.0, 0.0), m);
        assert!(close(zero.dx, 0.0, EPS) && close(zero.dy, 0.0, EPS) && close(zero.dtheta, 0.0, EPS));

        let d = invert_displacement(&Displacement::new(1.0, 0.0, 0.0), m);
        assert!(close(d.dx, -1.0, EPS) && close(d.dy, 0.0, EPS) && close(d.dtheta, 0.0, EPS));

        // -R(-pi/2) (1, 0) = (0, 1)
        let d = invert_displacement(&Displacement::new(1.0, 0.0, FRAC_PI_2), m);
        assert!(close(d.dx, 0.0, EPS) && close(d.dy, 1.0, EPS) && close(d.dtheta, -FRAC_PI_2, EPS));
    }

    #[test]
    fn frame_fields_are_orthonormal() {
        for k in 0..32 {
            let p = LiftedPoint::new(1.0, -2.0, k as f64 * 0.3);
            let a = VectorField::X1.at(&p);
            let b = VectorField::X3.at(&p);
            let dot: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
            assert!(dot.abs() < EPS);
            assert!(close(a.iter().map(|v| v * v).sum::<f64>(), 1.0, EPS));
            assert!(close(b.iter().map(|v| v * v).sum::<f64>(), 1.0, EPS));
            assert_eq!(VectorField::X2.at(&p), [0.0, 0.0, 1.0]);
        }
    }

    fn point() -> impl Strategy<Value = LiftedPoint> {
        (-100.0..100.0f64, -100.0..100.0f64, 0.0..TAU).prop_map(|(x, y, t)| LiftedPoint::new(x, y, t))
    }

    fn angle_dist(a: f64, b: f64, mode: Polarity) -> f64 {
        wrap_centered(a - b, mode).abs()
    }

    proptest! {
        #[test]
        fn inverse_swaps_endpoints(p in point(), q in point()) {
            let m = Polarity::Polarized;
            let inv = invert_displacement(&group_displacement(&p, &q, m), m);
            let back = group_displacement(&q, &p, m);
            prop_assert!(close(inv.dx, back.dx, 1e-12 * (1.0 + back.dx.abs())));
            prop_assert!(close(inv.dy, back.dy, 1e-12 * (1.0 + back.dy.abs())));
            prop_assert!(angle_dist(inv.dtheta, back.dtheta, m) < 1e-12);
        }

        #[test]
        fn unpolarized_inverse_up_to_sign(p in point(), q in point()) {
            let m = Polarity::Unpolarized;
            let p = p.canonical(m).unwrap();
            let q = q.canonical(m).unwrap();
            let inv = invert_displacement(&group_displacement(&p, &q, m), m);
            let back = group_displacement(&q, &p, m);
            let same = close(inv.dx, back.dx, 1e-9) && close(inv.dy, back.dy, 1e-9);
            let flipped = close(inv.dx, -back.dx, 1e-9) && close(inv.dy, -back.dy, 1e-9);
            prop_assert!(same || flipped);
            prop_assert!(angle_dist(inv.dtheta, back.dtheta, m) < 1e-12);
        }

        #[test]
        fn double_inverse_is_identity(dx in -50.0..50.0f64, dy in -50.0..50.0f64, t in -PI..PI) {
            let m = Polarity::Polarized;
            let d = Displacement::new(dx, dy, t);
            let dd = invert_displacement(&invert_displacement(&d, m), m);
            prop_assert!(close(dd.dx, dx, 1e-12) && close(dd.dy, dy, 1e-12));
            prop_assert!(angle_dist(dd.dtheta, t, m) < 1e-12);
        }

        #[test]
        fn displacement_is_left_invariant(
            p in point(), q in point(),
            tx in -100.0..100.0f64, ty in -100.0..100.0f64, a in 0.0..TAU,
        ) {
            let g = RigidMotion::new(tx, ty, a);
            let m = Polarity::Polarized;
            let d0 = group_displacement(&p, &q, m);
            let d1 = group_displacement(&g.apply(&p), &g.apply(&q), m);
            prop_assert!(close(d0.dx, d1.dx, 1e-9) && close(d0.dy, d1.dy, 1e-9));
            prop_assert!(angle_dist(d0.dtheta, d1.dtheta, m) < 1e-9);
        }

        #[test]
        fn wrap_is_idempotent_and_periodic(t in -1e3..1e3f64, k in -20i32..20) {
            for m in [Polarity::Polarized, Polarity::Unpolarized] {
                let w = wrap_angle(t, m).unwrap();
                prop_assert!((0.0..m.period()).contains(&w));
                prop_assert_eq!(wrap_angle(w, m).unwrap(), w);
                let turns = (t - w) / m.period();
                prop_assert!((turns - turns.round()).abs() < 1e-9);
                let shifted = wrap_angle(t + k as f64 * m.period(), m).unwrap();
                prop_assert!(angle_dist(shifted, w, m) < 1e-9);
            }
        }
    }
}
