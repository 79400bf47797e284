//! Text format for datasets.
//!
//! ```text
//! d 2            # Euclidean points in R^2
//! 1 0.5 3        # <weight> <c1> ... <cd>
//! 2.5 -1 4
//! ```
//!
//! ```text
//! n 3            # finite metric on {0, 1, 2}
//! 0 1 2          # row-major distance matrix
//! 1 0 1
//! 2 1 0
//! w 1 1 3        # optional weights, unit by default
//! ```
//!
//! Blank lines and text after `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, WeightedPointSet};

/// A weighted point set together with the metric it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub metric: MetricSpace,
    pub points: WeightedPointSet,
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("bad number '{t}'"),
            })
        })
        .collect()
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: "missing 'd <dim>' or 'n <size>' header".into(),
    })?;
    let bad_header = || Error::Parse {
        line: hl,
        msg: format!("bad header '{header}'"),
    };
    let (kind, size) = header.split_once(char::is_whitespace).ok_or_else(bad_header)?;
    let size: usize = size.trim().parse().map_err(|_| bad_header())?;
    if size == 0 {
        return Err(bad_header());
    }
    match kind {
        "d" => {
            let mut points = WeightedPointSet::new();
            for (i, line) in lines {
                let v = numbers(line, i)?;
                if v.len() != size + 1 {
                    return Err(Error::Parse {
                        line: i,
                        msg: format!("expected weight and {size} coordinates, got {} numbers", v.len()),
                    });
                }
                points.push(Point::Coords(v[1..].to_vec()), v[0]).map_err(|e| Error::Parse { line: i, msg: e.to_string() })?;
            }
            Ok(Dataset {
                metric: MetricSpace::euclidean(size),
                points,
            })
        }
        "n" => {
            let mut dist = Vec::with_capacity(size * size);
            let mut weights = None;
            for (i, line) in lines {
                if let Some(rest) = line.strip_prefix('w') {
                    let w = numbers(rest, i)?;
                    if w.len() != size || weights.is_some() {
                        return Err(Error::Parse {
                            line: i,
                            msg: format!("weight line must appear once with {size} entries"),
                        });
                    }
                    weights = Some(w);
                    continue;
                }
                let row = numbers(line, i)?;
                if row.len() != size || dist.len() >= size * size {
                    return Err(Error::Parse {
                        line: i,
                        msg: format!("matrix rows must have {size} entries and there must be {size} of them"),
                    });
                }
                dist.extend(row);
            }
            if dist.len() != size * size {
                return Err(Error::Parse {
                    line: hl,
                    msg: format!("matrix has {} of {size} rows", dist.len() / size),
                });
            }
            let metric = MetricSpace::finite(size, dist)?;
            let w = weights.unwrap_or_else(|| vec![1.0; size]);
            let points = WeightedPointSet::from_weighted(w.into_iter().enumerate().map(|(i, w)| (Point::Index(i), w)))?;
            Ok(Dataset { metric, points })
        }
        _ => Err(bad_header()),
    }
}

/// Serializes a Euclidean or finite dataset; output is deterministic and
/// parses back to an equal dataset.
pub fn format_dataset(ds: &Dataset) -> Result<String> {
    let mut out = String::new();
    match &ds.metric {
        MetricSpace::Finite(f) => {
            let n = f.size();
            let _ = writeln!(out, "n {n}");
            for i in 0..n {
                let row: Vec<String> = (0..n).map(|j| f.get(i, j).to_string()).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
            let w: Vec<String> = (0..n).map(|i| ds.points.weight_of(&Point::Index(i)).to_string()).collect();
            let _ = writeln!(out, "w {}", w.join(" "));
        }
        MetricSpace::EuclideanLp { d, p } if *p == 2.0 => {
            let _ = writeln!(out, "d {d}");
            for (pt, w) in ds.points.iter() {
                let c = pt.as_coords().ok_or_else(|| Error::InvalidPoint(format!("{pt:?} has no coordinates")))?;
                let _ = write!(out, "{w}");
                for v in c {
                    let _ = write!(out, " {v}");
                }
                out.push('\n');
            }
        }
        other => return Err(Error::InvalidMetric(format!("{other:?} has no dataset file format"))),
    }
    Ok(out)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    std::fs::write(path, format_dataset(ds)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_round_trip() {
        let text = "d 2\n1 0.5 3\n2.5 -1 4\n";
        let ds = parse_dataset(text).unwrap();
        assert_eq!(ds.points.len(), 2);
        assert_eq!(ds.points.total_weight(), 3.5);
        assert_eq!(format_dataset(&ds).unwrap(), text);
    }

    #[test]
    fn finite_round_trip() {
        let text = "# path\nn 3\n0 1 2\n1 0 1\n2 1 0\nw 1 1 3\n";
        let ds = parse_dataset(text).unwrap();
        assert_eq!(ds.points.weight_of(&Point::Index(2)), 3.0);
        assert_eq!(parse_dataset(&format_dataset(&ds).unwrap()).unwrap(), ds);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(parse_dataset("d 2\n1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dataset("x 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dataset("d 1\n\n-1 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_dataset("n 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_dataset("n 2\n0 1\n2 0\n"), Err(Error::InvalidMetric(_))));
    }
}
