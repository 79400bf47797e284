use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::{Point, WeightedPointSet};

/// Insertion (`+1`) or deletion (`-1`) of a grid point of `[1, delta]^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamUpdate {
    pub coords: Vec<u64>,
    pub sign: i64,
}

/// A dynamic stream over the grid `[1, delta]^d`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stream {
    pub d: usize,
    pub delta: u64,
    pub updates: Vec<StreamUpdate>,
}

impl Stream {
    pub fn new(d: usize, delta: u64) -> Result<Self> {
        if d == 0 || delta == 0 {
            return Err(Error::Parameter("stream needs d >= 1 and delta >= 1".into()));
        }
        let s = Stream {
            d,
            delta,
            updates: Vec::new(),
        };
        // Every key of the grid must fit the 62-bit key space.
        s.key(&vec![delta; d])?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn push(&mut self, coords: Vec<u64>, sign: i64) -> Result<()> {
        if sign != 1 && sign != -1 {
            return Err(Error::Stream(format!("update sign must be +1 or -1, got {sign}")));
        }
        self.key(&coords)?;
        self.updates.push(StreamUpdate { coords, sign });
        Ok(())
    }

    pub fn insert(&mut self, coords: Vec<u64>) -> Result<()> {
        self.push(coords, 1)
    }

    pub fn delete(&mut self, coords: Vec<u64>) -> Result<()> {
        self.push(coords, -1)
    }

    /// Number of insertions, an upper bound on the final dataset size.
    pub fn insertions(&self) -> usize {
        self.updates.iter().filter(|u| u.sign > 0).count()
    }

    /// Mixed-radix key `sum (c_j - 1) delta^j`, below `2^62`.
    pub fn key(&self, coords: &[u64]) -> Result<u64> {
        if coords.len() != self.d {
            return Err(Error::InvalidPoint(format!("expected {} coordinates, got {}", self.d, coords.len())));
        }
        let mut key: u64 = 0;
        for &c in coords.iter().rev() {
            if c == 0 || c > self.delta {
                return Err(Error::InvalidPoint(format!("coordinate {c} outside [1, {}]", self.delta)));
            }
            key = key
                .checked_mul(self.delta)
                .and_then(|k| k.checked_add(c - 1))
                .filter(|k| *k < 1 << 62)
                .ok_or_else(|| Error::Overflow(format!("grid [{}]^{} exceeds 2^62 keys", self.delta, self.d)))?;
        }
        Ok(key)
    }

    pub fn coords_of(&self, mut key: u64) -> Vec<u64> {
        (0..self.d)
            .map(|_| {
                let c = key % self.delta + 1;
                key /= self.delta;
                c
            })
            .collect()
    }

    pub fn point_of(&self, key: u64) -> Point {
        Point::Coords(self.coords_of(key).into_iter().map(|c| c as f64).collect())
    }

    /// Final multiplicity of every point with a nonzero count, by key.
    pub fn final_counts(&self) -> Result<BTreeMap<u64, i64>> {
        let mut counts: BTreeMap<u64, i64> = BTreeMap::new();
        for u in &self.updates {
            *counts.entry(self.key(&u.coords)?).or_default() += u.sign;
        }
        counts.retain(|_, c| *c != 0);
        if let Some((k, c)) = counts.iter().find(|(_, c)| **c < 0) {
            return Err(Error::Stream(format!("point {:?} ends with multiplicity {c}", self.coords_of(*k))));
        }
        Ok(counts)
    }

    /// The dataset the stream represents, as unit-weight multiplicities.
    pub fn final_multiset(&self) -> Result<WeightedPointSet> {
        let mut x = WeightedPointSet::new();
        for (k, c) in self.final_counts()? {
            x.push(self.point_of(k), c as f64)?;
        }
        Ok(x)
    }

    /// Parses the `stream d=<d> delta=<delta>` header followed by `+|- c1 .. cd` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing stream header".into(),
        })?;
        let (mut d, mut delta) = (None, None);
        let mut fields = header.split_whitespace();
        if fields.next() != Some("stream") {
            return Err(Error::Parse {
                line: 1,
                msg: "header must start with 'stream'".into(),
            });
        }
        for f in fields {
            let bad = || Error::Parse {
                line: 1,
                msg: format!("bad header field '{f}'"),
            };
            match f.split_once('=') {
                Some(("d", v)) => d = Some(v.parse::<usize>().map_err(|_| bad())?),
                Some(("delta", v)) => delta = Some(v.parse::<u64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let (Some(d), Some(delta)) = (d, delta) else {
            return Err(Error::Parse {
                line: 1,
                msg: "header needs d=<d> and delta=<delta>".into(),
            });
        };
        let mut s = Stream::new(d, delta)?;
        for (i, line) in lines {
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let mut f = line.split_whitespace();
            let sign = match f.next() {
                Some("+") => 1,
                Some("-") => -1,
                other => return Err(err(format!("expected '+' or '-', got {other:?}"))),
            };
            let coords = f.map(|c| c.parse::<u64>().map_err(|_| err(format!("bad coordinate '{c}'")))).collect::<Result<Vec<_>>>()?;
            s.push(coords, sign).map_err(|e| err(e.to_string()))?;
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("stream d={} delta={}\n", self.d, self.delta);
        for u in &self.updates {
            out.push(if u.sign > 0 { '+' } else { '-' });
            for c in &u.coords {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_round_trip() {
        let s = Stream::new(3, 64).unwrap();
        for c in [vec![1, 1, 1], vec![64, 2, 33], vec![64, 64, 64]] {
            assert_eq!(s.coords_of(s.key(&c).unwrap()), c);
        }
        assert!(s.key(&[0, 1, 1]).is_err());
        assert!(s.key(&[65, 1, 1]).is_err());
        assert!(matches!(Stream::new(40, 1 << 20), Err(Error::Overflow(_))));
    }

    #[test]
    fn parse_and_print() {
        let text = "stream d=2 delta=8\n+ 1 2\n+ 3 4\n- 1 2\n";
        let s = Stream::parse(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_text(), text);
        let x = s.final_multiset().unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x.point(0), &Point::coords(vec![3.0, 4.0]));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(Stream::parse("stream d=2 delta=8\n+ 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Stream::parse("points d=2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Stream::parse("stream d=2 delta=8\n* 1 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn negative_final_count_is_an_error() {
        let mut s = Stream::new(1, 4).unwrap();
        s.delete(vec![2]).unwrap();
        assert!(matches!(s.final_counts(), Err(Error::Stream(_))));
    }
}
