//! Oriented-element stimuli: generators for each experiment family and a
//! plain-text file format.

mod fhh;
mod figures;
mod kanizsa;
mod text;

pub use fhh::{gen_fhh, FhhConfig, TurnSign};
pub use figures::{
    gen_angle, gen_contrast_square, gen_curve_line, gen_segments, AngleConfig, ContrastSquareConfig, CurveLineConfig,
    SegmentsConfig,
};
pub use kanizsa::{gen_kanizsa_bar, gen_kanizsa_square, gen_kanizsa_triangle, KanizsaBarConfig, KanizsaConfig};
pub use text::{parse_stimulus, serialize_stimulus};

use crate::error::{invalid, Result};
use crate::geometry::{wrap_centered, LiftedPoint, Polarity};

pub const BACKGROUND: &str = "background";

/// An ordered set of lifted elements sharing one polarity mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Stimulus {
    elements: Vec<LiftedPoint>,
    mode: Polarity,
    labels: Option<Vec<String>>,
}

impl Stimulus {
    /// Builds a stimulus, reducing every angle to the canonical range.
    pub fn new(elements: Vec<LiftedPoint>, mode: Polarity) -> Result<Self> {
        Self::build(elements, None, mode)
    }

    pub fn labeled(elements: Vec<LiftedPoint>, labels: Vec<String>, mode: Polarity) -> Result<Self> {
        Self::build(elements, Some(labels), mode)
    }

    fn build(elements: Vec<LiftedPoint>, labels: Option<Vec<String>>, mode: Polarity) -> Result<Self> {
        if elements.is_empty() {
            return invalid("a stimulus needs at least one element");
        }
        if let Some(l) = &labels {
            if l.len() != elements.len() {
                return invalid(format!("{} labels for {} elements", l.len(), elements.len()));
            }
            if let Some(bad) = l.iter().find(|s| s.is_empty() || s.chars().any(char::is_whitespace)) {
                return invalid(format!("label `{bad}` must be a non-empty word"));
            }
        }
        let elements = elements
            .into_iter()
            .map(|p| p.canonical(mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { elements, mode, labels })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[LiftedPoint] {
        &self.elements
    }

    pub fn mode(&self) -> Polarity {
        self.mode
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    /// Indices whose label satisfies `pred`.
    pub fn indices_where(&self, pred: impl Fn(&str) -> bool) -> Vec<usize> {
        match &self.labels {
            Some(l) => l.iter().enumerate().filter(|(_, s)| pred(s)).map(|(i, _)| i).collect(),
            None => Vec::new(),
        }
    }

    pub fn indices_labeled(&self, label: &str) -> Vec<usize> {
        self.indices_where(|s| s == label)
    }

    /// Same elements in `order` (a permutation of `0..len`).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return invalid("order is not a permutation");
            }
        }
        if order.len() != self.len() {
            return invalid("order is not a permutation");
        }
        Ok(Self {
            elements: order.iter().map(|&i| self.elements[i]).collect(),
            mode: self.mode,
            labels: self.labels.as_ref().map(|l| order.iter().map(|&i| l[i].clone()).collect()),
        })
    }

    /// Largest pairwise distance between inducing elements. When some labels
    /// name an inducer (`inducer-k`, `arc-k`, `wall-k`) only those elements
    /// count; otherwise every element is an inducer.
    pub fn max_inducer_distance(&self) -> f64 {
        let inducers: Vec<&LiftedPoint> = match &self.labels {
            Some(l) if l.iter().any(|s| inducer_of(s).is_some()) => self
                .elements
                .iter()
                .zip(l)
                .filter(|(_, s)| inducer_of(s).is_some())
                .map(|(p, _)| p)
                .collect(),
            _ => self.elements.iter().collect(),
        };
        let mut best = 0.0f64;
        for (i, p) in inducers.iter().enumerate() {
            for q in &inducers[i + 1..] {
                best = best.max(p.distance(q));
            }
        }
        best
    }

    pub fn digest(&self) -> u64 {
        crate::fnv1a(serialize_stimulus(self).as_bytes())
    }
}

/// Number of the inducer an element belongs to, from labels of the form
/// `inducer-<k>-...`, `arc-<k>` or `wall-<k>`.
pub fn inducer_of(label: &str) -> Option<usize> {
    let mut parts = label.split('-');
    match parts.next()? {
        "inducer" | "arc" | "wall" => parts.next()?.parse().ok(),
        _ => None,
    }
}

/// True for mouth-edge labels `inducer-<k>-<edge>`.
pub fn is_mouth_edge(label: &str) -> bool {
    label.starts_with("inducer-")
}

/// Worst of the orientation mismatch and the mismatch between `p`'s
/// orientation and the chord `p -> q`, in radians. Zero iff collinear.
pub fn alignment_residual(p: &LiftedPoint, q: &LiftedPoint, mode: Polarity) -> f64 {
    let turn = wrap_centered(q.theta - p.theta, mode).abs();
    let chord = (q.y - p.y).atan2(q.x - p.x);
    // the chord direction is unsigned: a collinear element may lie behind
    let off = wrap_centered(chord - p.theta, Polarity::Unpolarized).abs();
    turn.max(off)
}

pub(crate) fn push(elements: &mut Vec<LiftedPoint>, labels: &mut Vec<String>, p: LiftedPoint, label: impl Into<String>) {
    elements.push(p);
    labels.push(label.into());
}
