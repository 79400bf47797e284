use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{Point, WeightedPointSet};

use super::{BoundedPartition, Part, PartTag};

/// Lattice coordinates of a hash bucket.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BucketId(pub Vec<i64>);

impl BucketId {
    /// Zigzag little-endian base-128 varints, concatenated.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.0.len() * 2);
        for &v in &self.0 {
            let mut u = ((v << 1) ^ (v >> 63)) as u64;
            loop {
                let byte = (u & 0x7f) as u8;
                u >>= 7;
                if u == 0 {
                    out.push(byte);
                    break;
                }
                out.push(byte | 0x80);
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut vals = Vec::new();
        let mut u = 0u64;
        let mut shift = 0u32;
        let mut open = false;
        for &b in bytes {
            if shift >= 64 {
                return Err(Error::Parameter("bucket id varint too long".into()));
            }
            u |= ((b & 0x7f) as u64) << shift;
            open = true;
            if b & 0x80 == 0 {
                vals.push(((u >> 1) as i64) ^ -((u & 1) as i64));
                u = 0;
                shift = 0;
                open = false;
            } else {
                shift += 7;
            }
        }
        if open {
            return Err(Error::Parameter("truncated bucket id".into()));
        }
        Ok(BucketId(vals))
    }
}

/// Data-oblivious partition of `R^d` into buckets of diameter at most `lambda`.
///
/// A randomly shifted cubic lattice has cells of diagonal `lambda`; a point goes
/// to the lexicographically first lattice cell whose center lies within
/// `lambda/2`. Its own cell's center always qualifies.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentHash {
    d: usize,
    lambda: f64,
    side: f64,
    shift: Vec<f64>,
    seed: u64,
}

impl ConsistentHash {
    pub fn new(d: usize, lambda: f64, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Parameter(format!("lambda = {lambda} must be positive and finite")));
        }
        let side = lambda / (d as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..d).map(|_| rng.random::<f64>() * side).collect();
        Ok(ConsistentHash {
            d,
            lambda,
            side,
            shift,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Size of the descriptor in machine words (`d` shifts plus three scalars).
    pub fn descriptor_words(&self) -> usize {
        self.d + 3
    }

    fn center(&self, j: usize, a: i64) -> f64 {
        self.shift[j] + (a as f64 + 0.5) * self.side
    }

    pub fn eval_coords(&self, x: &[f64]) -> BucketId {
        debug_assert_eq!(x.len(), self.d);
        let own: Vec<i64> = (0..self.d)
            .map(|j| ((x[j] - self.shift[j]) / self.side).floor() as i64)
            .collect();
        let own_gap: Vec<f64> = (0..self.d).map(|j| (x[j] - self.center(j, own[j])).powi(2)).collect();
        let mut tail: Vec<f64> = vec![0.0; self.d + 1];
        for j in (0..self.d).rev() {
            tail[j] = tail[j + 1] + own_gap[j];
        }
        let reach = ((self.d as f64).sqrt() / 2.0).ceil() as i64 + 1;
        let mut budget = (self.lambda / 2.0).powi(2) * (1.0 + 1e-12);
        let mut id = Vec::with_capacity(self.d);
        for j in 0..self.d {
            let rest = tail[j + 1];
            let mut pick = own[j];
            for a in own[j] - reach..=own[j] {
                let g = (x[j] - self.center(j, a)).powi(2);
                if g + rest <= budget {
                    pick = a;
                    break;
                }
            }
            budget -= (x[j] - self.center(j, pick)).powi(2);
            id.push(pick);
        }
        BucketId(id)
    }

    /// Bucket of a Euclidean point.
    pub fn eval(&self, x: &Point) -> Result<BucketId> {
        match x.as_coords() {
            Some(c) if c.len() == self.d => Ok(self.eval_coords(c)),
            _ => Err(Error::InvalidPoint(format!("consistent hash needs {} coordinates", self.d))),
        }
    }

    fn cell_range(&self, j: usize, delta: u64) -> (i64, i64) {
        let lo = ((1.0 - self.shift[j] - self.lambda) / self.side).floor() as i64 - 1;
        let hi = ((delta as f64 - self.shift[j] + self.lambda) / self.side).floor() as i64 + 1;
        (lo, hi)
    }

    /// Number of distinct bucket indices addressable for points in `[1, delta]^d`.
    pub fn index_range(&self, delta: u64) -> Result<u64> {
        let mut total: u64 = 1;
        for j in 0..self.d {
            let (lo, hi) = self.cell_range(j, delta);
            total = total
                .checked_mul((hi - lo + 1) as u64)
                .filter(|t| *t <= 1u64 << 62)
                .ok_or_else(|| Error::Overflow(format!("bucket index space exceeds 2^62 in dimension {}", j + 1)))?;
        }
        Ok(total)
    }

    /// Mixed-radix index of a bucket of a point in `[1, delta]^d`, in `[0, index_range)`.
    pub fn bucket_index(&self, id: &BucketId, delta: u64) -> Result<u64> {
        self.index_range(delta)?;
        let mut idx: u64 = 0;
        for j in (0..self.d).rev() {
            let (lo, hi) = self.cell_range(j, delta);
            let a = id.0[j];
            if a < lo || a > hi {
                return Err(Error::Overflow(format!("bucket coordinate {a} outside the grid range")));
            }
            idx = idx * (hi - lo + 1) as u64 + (a - lo) as u64;
        }
        Ok(idx)
    }

    /// Upper bound on the number of buckets met by any ball of radius `r`:
    /// lattice centers within `lambda/2 + r` of the ball's center.
    pub fn lambda_bound(&self, r: f64) -> usize {
        let reach = 2.0 * (self.lambda / 2.0 + r) / self.side + 1.0;
        (reach.ceil() as usize).saturating_pow(self.d as u32)
    }
}

/// Groups `X` by bucket, in order of first appearance.
pub fn partition_from_hash(phi: &ConsistentHash, x: &WeightedPointSet) -> Result<(BoundedPartition, Vec<BucketId>)> {
    let mut index: HashMap<BucketId, usize> = HashMap::new();
    let mut parts: Vec<Part> = Vec::new();
    let mut ids = Vec::new();
    for (i, (p, w)) in x.iter().enumerate() {
        let b = phi.eval(p)?;
        let slot = *index.entry(b.clone()).or_insert_with(|| {
            parts.push(Part {
                members: Vec::new(),
                tag: PartTag::Plain,
            });
            ids.push(b);
            parts.len() - 1
        });
        parts[slot].members.push((i, w));
    }
    Ok((
        BoundedPartition {
            parts,
            lambda: phi.lambda(),
        },
        ids,
    ))
}
