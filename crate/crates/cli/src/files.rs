//! Small text formats read by the validation and render commands.

use anyhow::{bail, Context, Result};
use segeo::{LiftedPoint, PerceptualUnit};

fn numbers(fields: &[&str], line_no: usize) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("line {line_no}: `{f}` is not a finite number"))
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

/// `x y mass` mass points.
pub fn parse_density(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for (line_no, fields) in content_lines(text) {
        let v = numbers(&fields, line_no)?;
        let [x, y, mass] = v[..] else {
            bail!("line {line_no}: expected `x y mass`");
        };
        if mass < 0.0 {
            bail!("line {line_no}: mass must be nonnegative");
        }
        out.push((x, y, mass));
    }
    if out.is_empty() {
        bail!("density file has no samples");
    }
    Ok(out)
}

/// A center element and named flanker sets.
#[derive(Debug, PartialEq)]
pub struct FlankerSets {
    pub center: LiftedPoint,
    pub sets: Vec<(String, Vec<LiftedPoint>)>,
}

/// Lines `<set> x y theta` add a flanker to a set, in first-appearance
/// order; an optional `center x y theta` line moves the center away from
/// the origin.
pub fn parse_flankers(text: &str) -> Result<FlankerSets> {
    let mut center = LiftedPoint::new(0.0, 0.0, 0.0);
    let mut sets: Vec<(String, Vec<LiftedPoint>)> = Vec::new();
    for (line_no, fields) in content_lines(text) {
        if fields.len() != 4 {
            bail!("line {line_no}: expected `<set> x y theta`");
        }
        let v = numbers(&fields[1..], line_no)?;
        let p = LiftedPoint::new(v[0], v[1], v[2]);
        match fields[0] {
            "center" => center = p,
            name => match sets.iter_mut().find(|(n, _)| n == name) {
                Some((_, set)) => set.push(p),
                None => sets.push((name.to_string(), vec![p])),
            },
        }
    }
    if sets.is_empty() {
        bail!("no flanker sets");
    }
    Ok(FlankerSets { center, sets })
}

/// The `unit` lines of a grouping report.
pub fn parse_units(text: &str) -> Result<Vec<PerceptualUnit>> {
    let mut units = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.first() != Some(&"unit") {
            continue;
        }
        let bad = || format!("line {}: expected `unit <rank> saliency <value> members <i,j,...>`", i + 1);
        let (rank, saliency, members) = match fields[..] {
            ["unit", rank, "saliency", s, "members"] => (rank, s, ""),
            ["unit", rank, "saliency", s, "members", m] => (rank, s, m),
            _ => bail!(bad()),
        };
        let members = members
            .split(',')
            .filter(|m| !m.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<usize>, _>>()
            .with_context(bad)?;
        units.push(PerceptualUnit {
            members,
            saliency: saliency.parse().with_context(bad)?,
            rank: rank.parse().with_context(bad)?,
            degenerate: false,
        });
    }
    Ok(units)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flanker_sets_keep_their_order() {
        let f = parse_flankers("# demo\nb 1 2 0\na 3 4 0.5\nb 5 6 0\ncenter 1 1 0\n").unwrap();
        assert_eq!(f.center, LiftedPoint::new(1.0, 1.0, 0.0));
        assert_eq!(f.sets[0].0, "b");
        assert_eq!(f.sets[0].1.len(), 2);
        assert_eq!(f.sets[1].1, vec![LiftedPoint::new(3.0, 4.0, 0.5)]);
        assert!(parse_flankers("center 0 0 0\n").is_err());
        assert!(parse_flankers("a 1 2\n").is_err());
    }

    #[test]
    fn unit_lines_round_trip() {
        let units = parse_units("unit 1 saliency 2.5e-1 members 0,3,4\nunit 2 saliency 1e-2 members \neigenvalues 1 2\n").unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].members, vec![0, 3, 4]);
        assert_eq!(units[0].saliency, 0.25);
        assert!(units[1].members.is_empty());
        assert!(parse_units("unit x saliency 1 members 1").is_err());
    }

    #[test]
    fn density_rejects_negative_mass() {
        assert_eq!(parse_density("0 0 1\n1 1 2\n").unwrap().len(), 2);
        assert!(parse_density("0 0 -1\n").is_err());
        assert!(parse_density("# nothing\n").is_err());
    }
}
