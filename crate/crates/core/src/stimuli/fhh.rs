//! Snake-in-noise paths: a smooth chain of elements hidden among randomly
//! oriented distractors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{push, Stimulus, BACKGROUND};
use crate::error::{invalid, Error, Result};
use crate::geometry::{LiftedPoint, Polarity};

const PLACEMENT_TRIES: usize = 10_000;

/// How the sign of each turn along the path is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TurnSign {
    Alternating,
    Random,
    Positive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FhhConfig {
    pub n_path: usize,
    /// Turn between successive path elements, in degrees.
    pub angle_step: f64,
    pub element_gap: f64,
    pub n_background: usize,
    /// Field size `(width, height)`, centered on the origin.
    pub field: (f64, f64),
    pub min_sep: f64,
    pub seed: u64,
    pub turn: TurnSign,
    pub mode: Polarity,
}

impl Default for FhhConfig {
    fn default() -> Self {
        Self {
            n_path: 12,
            angle_step: 15.0,
            element_gap: 6.0,
            n_background: 20,
            field: (120.0, 120.0),
            min_sep: 4.0,
            seed: 1,
            turn: TurnSign::Alternating,
            mode: Polarity::Polarized,
        }
    }
}

/// Path elements first (labeled `path`), then distractors (`background`).
///
/// Successive path elements are `element_gap` apart and differ in orientation
/// by `angle_step`; the chord between them bisects the two orientations, so
/// every neighbouring pair is co-circular.
pub fn gen_fhh(cfg: &FhhConfig) -> Result<Stimulus> {
    if cfg.n_path < 2 {
        return invalid("a path needs at least two elements");
    }
    let (w, h) = cfg.field;
    let finite = [cfg.angle_step, cfg.element_gap, cfg.min_sep, w, h].iter().all(|v| v.is_finite());
    if !finite || cfg.element_gap <= 0.0 || cfg.min_sep < 0.0 || w <= 0.0 || h <= 0.0 {
        return invalid("path geometry must be finite with positive gap and field");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let step = cfg.angle_step.to_radians();
    let inside = |p: &LiftedPoint| p.x.abs() <= w / 2.0 && p.y.abs() <= h / 2.0;

    let signs: Vec<f64> = (0..cfg.n_path - 1)
        .map(|k| match cfg.turn {
            TurnSign::Alternating if k % 2 == 1 => -1.0,
            TurnSign::Alternating | TurnSign::Positive => 1.0,
            TurnSign::Random => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect();

    let mut path = None;
    for _ in 0..PLACEMENT_TRIES {
        let mut p = LiftedPoint::new(
            rng.random_range(-w / 2.0..=w / 2.0),
            rng.random_range(-h / 2.0..=h / 2.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let mut chain = vec![p];
        for s in &signs {
            let (sin, cos) = (p.theta + s * step / 2.0).sin_cos();
            p = LiftedPoint::new(p.x + cfg.element_gap * cos, p.y + cfg.element_gap * sin, p.theta + s * step);
            chain.push(p);
        }
        if chain.iter().all(inside) && separated(&chain, cfg.min_sep) {
            path = Some(chain);
            break;
        }
    }
    let Some(path) = path else {
        return Err(Error::Capacity(format!(
            "could not fit a {}-element path into a {w}x{h} field",
            cfg.n_path
        )));
    };

    let mut elements = Vec::with_capacity(cfg.n_path + cfg.n_background);
    let mut labels = Vec::with_capacity(elements.capacity());
    for p in path {
        push(&mut elements, &mut labels, p, "path");
    }
    scatter(&mut rng, &mut elements, &mut labels, cfg.n_background, cfg.field, cfg.min_sep, cfg.mode)?;
    Stimulus::labeled(elements, labels, cfg.mode)
}

/// Adds `n` uniformly placed, uniformly oriented background elements at
/// least `min_sep` away from everything already placed.
pub(crate) fn scatter(
    rng: &mut ChaCha8Rng,
    elements: &mut Vec<LiftedPoint>,
    labels: &mut Vec<String>,
    n: usize,
    (w, h): (f64, f64),
    min_sep: f64,
    mode: Polarity,
) -> Result<()> {
    for placed in 0..n {
        let spot = (0..PLACEMENT_TRIES).find_map(|_| {
            let x = rng.random_range(-w / 2.0..=w / 2.0);
            let y = rng.random_range(-h / 2.0..=h / 2.0);
            let theta = rng.random_range(0.0..mode.period());
            let far = elements.iter().all(|e| (e.x - x).hypot(e.y - y) >= min_sep);
            far.then_some(LiftedPoint::new(x, y, theta))
        });
        match spot {
            Some(p) => push(elements, labels, p, BACKGROUND),
            None => {
                return Err(Error::Capacity(format!(
                    "placed only {placed} of {n} background elements with separation {min_sep}"
                )))
            }
        }
    }
    Ok(())
}

fn separated(points: &[LiftedPoint], min_sep: f64) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, p)| points[i + 1..].iter().all(|q| p.distance(q) >= min_sep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wrap_centered;

    #[test]
    fn straight_path_is_collinear() {
        let cfg = FhhConfig {
            angle_step: 0.0,
            ..FhhConfig::default()
        };
        let s = gen_fhh(&cfg).unwrap();
        let path: Vec<_> = s.indices_labeled("path").iter().map(|&i| s.elements()[i]).collect();
        assert_eq!(path.len(), 12);
        let (a, b) = (path[0], path[11]);
        let (ux, uy) = ((b.x - a.x) / a.distance(&b), (b.y - a.y) / a.distance(&b));
        for p in &path {
            assert!(wrap_centered(p.theta - a.theta, cfg.mode).abs() < 1e-12);
            let cross = (p.x - a.x) * uy - (p.y - a.y) * ux;
            assert!(cross.abs() < 1e-9, "off-line by {cross}");
        }
    }

    #[test]
    fn positive_turns_accumulate() {
        let cfg = FhhConfig {
            n_background: 0,
            angle_step: 30.0,
            turn: TurnSign::Positive,
            field: (400.0, 400.0),
            ..FhhConfig::default()
        };
        let s = gen_fhh(&cfg).unwrap();
        let turns: f64 = s
            .elements()
            .windows(2)
            .map(|w| wrap_centered(w[1].theta - w[0].theta, cfg.mode))
            .sum();
        assert!((turns.to_degrees() - 11.0 * 30.0).abs() < 1e-9, "{}", turns.to_degrees());
    }

    #[test]
    fn chords_bisect_successive_orientations() {
        let s = gen_fhh(&FhhConfig::default()).unwrap();
        for w in s.elements()[..12].windows(2) {
            let heading = (w[1].y - w[0].y).atan2(w[1].x - w[0].x);
            let half = wrap_centered(w[1].theta - w[0].theta, Polarity::Polarized) / 2.0;
            assert!(wrap_centered(heading - w[0].theta - half, Polarity::Polarized).abs() < 1e-9);
            assert!((w[0].distance(&w[1]) - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_and_labeled() {
        let cfg = FhhConfig::default();
        let a = gen_fhh(&cfg).unwrap();
        assert_eq!(a, gen_fhh(&cfg).unwrap());
        assert_eq!(a.indices_labeled("path").len(), 12);
        assert_eq!(a.indices_labeled(BACKGROUND).len(), 20);
        let other = gen_fhh(&FhhConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn background_respects_separation() {
        let s = gen_fhh(&FhhConfig::default()).unwrap();
        let e = s.elements();
        for i in 0..e.len() {
            for j in 12.max(i + 1)..e.len() {
                assert!(e[i].distance(&e[j]) >= 4.0);
            }
        }
    }

    #[test]
    fn overcrowded_field_is_a_capacity_error() {
        let cfg = FhhConfig {
            n_background: 500,
            field: (40.0, 40.0),
            min_sep: 5.0,
            ..FhhConfig::default()
        };
        assert!(matches!(gen_fhh(&cfg), Err(Error::Capacity(_))));
        let cfg = FhhConfig {
            field: (10.0, 10.0),
            ..FhhConfig::default()
        };
        assert!(matches!(gen_fhh(&cfg), Err(Error::Capacity(_))));
    }
}
