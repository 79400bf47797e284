use std::collections::{BTreeMap, HashMap};

use super::hash::{derive_index, derive_seed, log2_ceil, UniversalHash};
use super::recovery::SparseRecovery;
use crate::error::{Error, Result};

/// A bucket recovered in full: its id and `(point, multiplicity)` pairs sorted by point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LightPart {
    pub bucket: u64,
    pub points: Vec<(u64, i64)>,
}

impl LightPart {
    pub fn size(&self) -> i64 {
        self.points.iter().map(|(_, c)| c).sum()
    }
}

/// Result of light-bucket identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LightOutcome {
    /// Every bucket of size at most `M`, sorted by bucket id.
    Parts(Vec<LightPart>),
    /// More than `N` nonempty buckets.
    Overflow,
    /// A sketch could not be decoded or some bucket was never isolated.
    Failed(String),
}

/// Parameters shared by the streaming sketch and its offline twin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightParams {
    /// Bucket budget `N`.
    pub n: usize,
    /// Light-bucket size bound `M`.
    pub m: usize,
    pub delta: f64,
}

impl LightParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Parameter("N and M must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        Ok(())
    }

    /// Number of hash repetitions `w = ceil(log2(N / delta))`.
    pub fn repetitions(&self) -> usize {
        (self.n as f64 / self.delta).log2().ceil().max(1.0) as usize
    }

    /// Output bits of each hash: the range `2^bits >= 2N`.
    pub fn range_bits(&self) -> u32 {
        log2_ceil(2 * self.n as u64)
    }

    fn hashes(&self, seed: u64) -> Vec<UniversalHash> {
        let root = derive_seed(seed, "light-hash");
        (0..self.repetitions()).map(|i| UniversalHash::new(derive_index(root, i as u64))).collect()
    }
}

/// For every nonempty bucket, the first repetition whose hash separates it
/// from all other buckets.
fn isolate(buckets: &[u64], hashes: &[UniversalHash], bits: u32) -> std::result::Result<Vec<usize>, u64> {
    let mut counts: Vec<HashMap<u64, usize>> = vec![HashMap::new(); hashes.len()];
    for (i, h) in hashes.iter().enumerate() {
        for &y in buckets {
            *counts[i].entry(h.bits(y, bits)).or_default() += 1;
        }
    }
    buckets
        .iter()
        .map(|&y| (0..hashes.len()).find(|&i| counts[i][&hashes[i].bits(y, bits)] == 1).ok_or(y))
        .collect()
}

/// Streaming identification of light buckets.
///
/// Keeps `w` hashes `h_i` from bucket ids to `2^bits >= 2N` cells, an
/// `M`-sparse recovery sketch of the points falling in each cell, and an
/// `N`-sparse sketch of the bucket sizes. After the stream, each bucket is
/// read from a cell where it is alone and kept iff it holds at most `M` points.
#[derive(Debug, Clone)]
pub struct LightSketch {
    params: LightParams,
    seed: u64,
    per_delta: f64,
    bits: u32,
    hashes: Vec<UniversalHash>,
    buckets: SparseRecovery,
    cells: HashMap<(usize, u64), SparseRecovery>,
}

impl LightSketch {
    pub fn new(params: LightParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let w = params.repetitions();
        let per_delta = params.delta / (2 * params.n * w + 1) as f64;
        Ok(LightSketch {
            params,
            seed,
            per_delta,
            bits: params.range_bits(),
            hashes: params.hashes(seed),
            buckets: SparseRecovery::new(params.n, per_delta, derive_seed(seed, "light-buckets"))?,
            cells: HashMap::new(),
        })
    }

    pub fn update(&mut self, bucket: u64, point: u64, delta: i64) {
        self.buckets.update(bucket, delta);
        let (seed, m, pd) = (self.seed, self.params.m, self.per_delta);
        for (i, h) in self.hashes.iter().enumerate() {
            let j = h.bits(bucket, self.bits);
            self.cells
                .entry((i, j))
                .or_insert_with(|| {
                    SparseRecovery::new(m, pd, derive_index(derive_seed(seed, "light-cell"), (i as u64) << 32 | j))
                        .expect("validated parameters")
                })
                .update(point, delta);
        }
    }

    pub fn finish(&self) -> LightOutcome {
        let Some(sizes) = self.buckets.decode() else {
            return LightOutcome::Overflow;
        };
        if sizes.iter().any(|(_, c)| *c < 0) {
            return LightOutcome::Failed("negative bucket size".into());
        }
        let ys: Vec<u64> = sizes.iter().map(|(y, _)| *y).collect();
        let reps = match isolate(&ys, &self.hashes, self.bits) {
            Ok(r) => r,
            Err(y) => return LightOutcome::Failed(format!("bucket {y} is never isolated")),
        };
        let mut parts = Vec::new();
        for ((y, size), i) in sizes.iter().zip(reps) {
            if *size as usize > self.params.m {
                continue;
            }
            let j = self.hashes[i].bits(*y, self.bits);
            let decoded = self.cells.get(&(i, j)).and_then(|s| s.decode());
            match decoded {
                Some(points) if points.iter().map(|(_, c)| c).sum::<i64>() == *size => parts.push(LightPart {
                    bucket: *y,
                    points,
                }),
                _ => return LightOutcome::Failed(format!("cell of bucket {y} could not be decoded")),
            }
        }
        LightOutcome::Parts(parts)
    }
}

/// Offline twin of [`LightSketch`] on a materialized multiset of
/// `(bucket, point, multiplicity)` items, using the same hashes.
pub fn light_parts_offline(items: &[(u64, u64, i64)], params: LightParams, seed: u64) -> Result<LightOutcome> {
    params.validate()?;
    let mut by_bucket: BTreeMap<u64, BTreeMap<u64, i64>> = BTreeMap::new();
    for &(b, p, c) in items {
        *by_bucket.entry(b).or_default().entry(p).or_default() += c;
    }
    by_bucket.retain(|_, pts| {
        pts.retain(|_, c| *c != 0);
        !pts.is_empty()
    });
    if by_bucket.len() > params.n {
        return Ok(LightOutcome::Overflow);
    }
    let ys: Vec<u64> = by_bucket.keys().copied().collect();
    if let Err(y) = isolate(&ys, &params.hashes(seed), params.range_bits()) {
        return Ok(LightOutcome::Failed(format!("bucket {y} is never isolated")));
    }
    Ok(LightOutcome::Parts(
        by_bucket
            .into_iter()
            .map(|(bucket, pts)| LightPart {
                bucket,
                points: pts.into_iter().collect(),
            })
            .filter(|p| p.size() as usize <= params.m)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(items: &[(u64, u64, i64)], p: LightParams, seed: u64) -> LightOutcome {
        let mut s = LightSketch::new(p, seed).unwrap();
        for &(b, q, c) in items {
            s.update(b, q, c);
        }
        s.finish()
    }

    #[test]
    fn keeps_only_small_buckets() {
        let mut items: Vec<(u64, u64, i64)> = vec![(1, 10, 1), (1, 11, 1)];
        items.extend((0..5).map(|i| (2, 20 + i, 1)));
        let p = LightParams { n: 10, m: 3, delta: 0.05 };
        let want = LightOutcome::Parts(vec![LightPart {
            bucket: 1,
            points: vec![(10, 1), (11, 1)],
        }]);
        assert_eq!(run(&items, p, 4), want);
        assert_eq!(light_parts_offline(&items, p, 4).unwrap(), want);
    }

    #[test]
    fn too_many_buckets_overflow() {
        let items: Vec<(u64, u64, i64)> = (0..11).map(|i| (i, i, 1)).collect();
        let p = LightParams { n: 10, m: 3, delta: 0.05 };
        assert_eq!(run(&items, p, 1), LightOutcome::Overflow);
        assert_eq!(light_parts_offline(&items, p, 1).unwrap(), LightOutcome::Overflow);
    }

    #[test]
    fn cancelled_points_vanish() {
        let items = vec![(5, 1, 1), (5, 2, 1), (5, 2, -1), (6, 3, 1), (6, 3, -1)];
        let p = LightParams { n: 4, m: 4, delta: 0.1 };
        let want = LightOutcome::Parts(vec![LightPart {
            bucket: 5,
            points: vec![(1, 1)],
        }]);
        assert_eq!(run(&items, p, 2), want);
        assert_eq!(light_parts_offline(&items, p, 2).unwrap(), want);
    }
}
