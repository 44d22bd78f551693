use std::fmt::Write as _;

use super::Stimulus;
use crate::error::{Error, Result};
use crate::geometry::{LiftedPoint, Polarity};

/// Parses the line format: a `mode <polarized|unpolarized>` header, then one
/// `x y theta [label]` element per line. Blank lines and `#` comments are
/// skipped anywhere.
pub fn parse_stimulus(text: &str) -> Result<Stimulus> {
    let mut mode = None;
    let mut elements = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split_whitespace().collect();

        let Some(mode) = mode else {
            match fields.as_slice() {
                ["mode", m] => mode = Some(m.parse::<Polarity>().map_err(|e| parse_err(e.to_string()))?),
                _ => return Err(parse_err("expected header `mode polarized|unpolarized`".into())),
            }
            continue;
        };

        if !(3..=4).contains(&fields.len()) {
            return Err(parse_err(format!("expected `x y theta [label]`, found {} fields", fields.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = fields[i]
                .parse()
                .map_err(|_| parse_err(format!("{name} `{}` is not a number", fields[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(format!("{name} must be finite")))
            }
        };
        let (x, y, theta) = (num(0, "x")?, num(1, "y")?, num(2, "theta")?);
        if theta < 0.0 || theta >= mode.period() {
            return Err(Error::Validation(format!(
                "line {line_no}: theta {theta} outside [0, {}) for {mode} mode",
                mode.period()
            )));
        }
        elements.push(LiftedPoint::new(x, y, theta));
        labels.push(fields.get(3).map(|s| s.to_string()));
    }

    let Some(mode) = mode else {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `mode` header".into(),
        });
    };
    if elements.is_empty() {
        return Err(Error::Validation("stimulus has no elements".into()));
    }
    let labeled = labels.iter().filter(|l| l.is_some()).count();
    if labeled == 0 {
        Stimulus::new(elements, mode)
    } else if labeled == labels.len() {
        Stimulus::labeled(elements, labels.into_iter().flatten().collect(), mode)
    } else {
        Err(Error::Validation("either every element carries a label or none does".into()))
    }
}

/// Writes the format read by [`parse_stimulus`]. Numbers use the shortest
/// representation that round-trips exactly.
pub fn serialize_stimulus(s: &Stimulus) -> String {
    let mut out = format!("mode {}\n", s.mode());
    for (i, p) in s.elements().iter().enumerate() {
        let _ = write!(out, "{:?} {:?} {:?}", p.x, p.y, p.theta);
        if let Some(l) = s.label(i) {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element() {
        let s = parse_stimulus("mode polarized\n0 0 0\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.elements()[0], LiftedPoint::new(0.0, 0.0, 0.0));
        assert_eq!(s.mode(), Polarity::Polarized);
        assert!(s.labels().is_none());
    }

    #[test]
    fn comments_labels_and_round_trip() {
        let text = "# a figure\nmode unpolarized\n\n1.5 -2 0.25 path\n# inline\n3 4 3.0 background\n";
        let s = parse_stimulus(text).unwrap();
        assert_eq!(s.label(1), Some("background"));
        let back = parse_stimulus(&serialize_stimulus(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn angle_out_of_range_is_a_validation_error() {
        let err = parse_stimulus("mode unpolarized\n0 0 4.0\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        assert!(parse_stimulus("mode polarized\n0 0 4.0\n").is_ok());
        assert!(matches!(parse_stimulus("mode polarized\n0 0 -0.1\n"), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let cases = [
            ("mode polarized\n0 0\n", 2),
            ("mode polarized\n0 0 0\n1 x 0\n", 3),
            ("0 0 0\n", 1),
            ("mode sideways\n", 1),
            ("mode polarized\n0 0 0 a b\n", 2),
            ("mode polarized\n0 0 NaN\n", 2),
        ];
        for (text, want) in cases {
            match parse_stimulus(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn mixed_labels_and_empty_bodies_are_rejected() {
        assert!(matches!(parse_stimulus("mode polarized\n0 0 0 a\n1 1 0\n"), Err(Error::Validation(_))));
        assert!(matches!(parse_stimulus("mode polarized\n"), Err(Error::Validation(_))));
        assert!(matches!(parse_stimulus(""), Err(Error::Parse { .. })));
    }
}
