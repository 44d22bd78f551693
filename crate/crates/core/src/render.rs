//! SVG drawings of stimuli with perceptual units highlighted.
//!
//! Stimulus coordinates have y pointing up; the drawing flips them so the
//! figure appears the right way up on screen.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::spectral::PerceptualUnit;
use crate::stimuli::Stimulus;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub segment_length: f64,
    /// Canvas size; `None` fits the stimulus plus the margin.
    pub canvas: Option<(f64, f64)>,
    pub margin: f64,
    /// Stroke colors for units in rank order, reused cyclically.
    pub palette: Vec<String>,
    pub background: String,
    pub stroke_width: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            segment_length: 4.0,
            canvas: None,
            margin: 10.0,
            palette: ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"]
                .map(String::from)
                .to_vec(),
            background: "#9a9a9a".into(),
            stroke_width: 1.5,
        }
    }
}

/// One `<line>` per element. An element belonging to several units takes
/// the color of the earliest one.
pub fn render_svg(s: &Stimulus, units: &[PerceptualUnit], spec: &RenderSpec) -> Result<String> {
    if !(spec.segment_length > 0.0) || spec.palette.is_empty() {
        return invalid("segment length must be positive and the palette nonempty");
    }
    let n = s.len();
    let mut color: Vec<Option<usize>> = vec![None; n];
    for (k, u) in units.iter().enumerate() {
        for &i in &u.members {
            if i >= n {
                return invalid(format!("unit {} names element {i} of {n}", u.rank));
            }
            color[i].get_or_insert(k);
        }
    }

    let half = spec.segment_length / 2.0;
    let e = s.elements();
    let fold = |f: fn(f64, f64) -> f64, init: f64, g: fn(&crate::geometry::LiftedPoint) -> f64| {
        e.iter().map(g).fold(init, f)
    };
    let (min_x, max_x) = (fold(f64::min, f64::INFINITY, |p| p.x), fold(f64::max, f64::NEG_INFINITY, |p| p.x));
    let (min_y, max_y) = (fold(f64::min, f64::INFINITY, |p| p.y), fold(f64::max, f64::NEG_INFINITY, |p| p.y));
    let pad = spec.margin + half;
    let (fit_w, fit_h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
    let (w, h) = spec.canvas.unwrap_or((fit_w, fit_h));
    // center the stimulus on the canvas
    let ox = (w - (max_x - min_x)) / 2.0 - min_x;
    let oy = (h - (max_y - min_y)) / 2.0 + max_y;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in e.iter().enumerate() {
        let (sin, cos) = p.theta.sin_cos();
        let (cx, cy) = (p.x + ox, oy - p.y);
        let (dx, dy) = (half * cos, -half * sin);
        let (stroke, class) = match color[i] {
            Some(k) => (spec.palette[k % spec.palette.len()].as_str(), format!("unit-{}", units[k].rank)),
            None => (spec.background.as_str(), "background".to_string()),
        };
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{:.2}" stroke-linecap="round"/>"#,
            cx - dx,
            cy - dy,
            cx + dx,
            cy + dy,
            spec.stroke_width
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
