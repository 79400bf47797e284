use std::collections::HashMap;

use super::hash::{derive_index, log2_ceil, splitmix64, UniversalHash};
use crate::error::{Error, Result};

const P: u64 = (1 << 61) - 1;
const HASHES: usize = 3;

fn mod_p(x: i128) -> u64 {
    x.rem_euclid(P as i128) as u64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Cell {
    count: i64,
    key_sum: i128,
    fp: u64,
}

impl Cell {
    fn is_zero(&self) -> bool {
        self.count == 0 && self.key_sum == 0 && self.fp == 0
    }
}

/// Linear sketch that recovers a frequency vector exactly when its support has
/// at most `k` keys and reports `None` otherwise.
///
/// Each repetition is an invertible lookup table of three subtables whose cells
/// hold `(count, key sum, fingerprint)`; decoding peels cells that verify as
/// holding a single key. Cells are stored sparsely, so untouched sketches are free.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRecovery {
    k: usize,
    reps: usize,
    bits: u32,
    hashes: Vec<UniversalHash>,
    fp_seed: u64,
    cells: HashMap<u32, Cell>,
}

impl SparseRecovery {
    /// `k`-sparse recovery failing with probability about `delta`.
    pub fn new(k: usize, delta: f64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("sparse recovery needs k >= 1".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Parameter(format!("delta = {delta} must lie in (0, 1)")));
        }
        let reps = 1 + ((1.0 / delta).log2() / 8.0).floor() as usize;
        let bits = log2_ceil((2 * k).max(8) as u64);
        let hashes = (0..reps * HASHES).map(|i| UniversalHash::new(derive_index(seed, i as u64))).collect();
        Ok(SparseRecovery {
            k,
            reps,
            bits,
            hashes,
            fp_seed: derive_index(seed, u64::MAX),
            cells: HashMap::new(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    /// Nominal number of cells (the space budget), touched or not.
    pub fn nominal_cells(&self) -> usize {
        self.reps * HASHES << self.bits
    }

    fn fingerprint(&self, key: u64) -> u64 {
        splitmix64(self.fp_seed ^ key) % P
    }

    fn slot(&self, rep: usize, t: usize, key: u64) -> u32 {
        let i = rep * HASHES + t;
        ((i as u32) << self.bits) | self.hashes[i].bits(key, self.bits) as u32
    }

    pub fn update(&mut self, key: u64, delta: i64) {
        if delta == 0 {
            return;
        }
        let f = mod_p(self.fingerprint(key) as i128 * delta as i128);
        for rep in 0..self.reps {
            for t in 0..HASHES {
                let s = self.slot(rep, t, key);
                let c = self.cells.entry(s).or_default();
                c.count += delta;
                c.key_sum += key as i128 * delta as i128;
                c.fp = (c.fp + f) % P;
                if c.is_zero() {
                    self.cells.remove(&s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    fn pure(&self, rep: usize, t: usize, slot: u32, c: &Cell) -> Option<u64> {
        if c.count == 0 || c.key_sum % c.count as i128 != 0 {
            return None;
        }
        let key = c.key_sum / c.count as i128;
        if !(0..=u64::MAX as i128).contains(&key) {
            return None;
        }
        let key = key as u64;
        (self.slot(rep, t, key) == slot && mod_p(self.fingerprint(key) as i128 * c.count as i128) == c.fp).then_some(key)
    }

    fn peel(&self, rep: usize) -> Option<Vec<(u64, i64)>> {
        let lo = (rep * HASHES) as u32;
        let hi = lo + HASHES as u32;
        let mut cells: HashMap<u32, Cell> =
            self.cells.iter().filter(|(s, _)| (lo..hi).contains(&(*s >> self.bits))).map(|(s, c)| (*s, *c)).collect();
        let mut queue: Vec<u32> = cells.keys().copied().collect();
        queue.sort_unstable();
        let mut out: HashMap<u64, i64> = HashMap::new();
        let mut steps = 0usize;
        let max_steps = 8 * (queue.len() + self.k) + 64;
        while let Some(s) = queue.pop() {
            steps += 1;
            if steps > max_steps {
                return None;
            }
            let Some(c) = cells.get(&s).copied() else { continue };
            let t = (s >> self.bits) as usize - rep * HASHES;
            let Some(key) = self.pure(rep, t, s, &c) else { continue };
            *out.entry(key).or_default() += c.count;
            let f = mod_p(self.fingerprint(key) as i128 * c.count as i128);
            for t in 0..HASHES {
                let s2 = self.slot(rep, t, key);
                let e = cells.entry(s2).or_default();
                e.count -= c.count;
                e.key_sum -= key as i128 * c.count as i128;
                e.fp = (e.fp + P - f) % P;
                if e.is_zero() {
                    cells.remove(&s2);
                } else {
                    queue.push(s2);
                }
            }
        }
        if !cells.is_empty() {
            return None;
        }
        let mut v: Vec<(u64, i64)> = out.into_iter().filter(|(_, c)| *c != 0).collect();
        v.sort_unstable();
        Some(v)
    }

    /// Support and frequencies sorted by key, or `None` when the support
    /// exceeds `k` or no repetition could be decoded.
    pub fn decode(&self) -> Option<Vec<(u64, i64)>> {
        if self.cells.is_empty() {
            return Some(Vec::new());
        }
        (0..self.reps).find_map(|r| self.peel(r)).filter(|v| v.len() <= self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_support() {
        let mut s = SparseRecovery::new(4, 0.05, 1).unwrap();
        for key in [10, 20, 30] {
            s.update(key, 1);
        }
        s.update(20, 1);
        assert_eq!(s.decode(), Some(vec![(10, 1), (20, 2), (30, 1)]));
    }

    #[test]
    fn insert_then_delete_is_empty() {
        let mut s = SparseRecovery::new(2, 0.05, 9).unwrap();
        s.update(77, 1);
        s.update(77, -1);
        assert!(s.is_zero());
        assert_eq!(s.decode(), Some(vec![]));
    }

    #[test]
    fn overfull_support_is_rejected() {
        let mut failures = 0;
        for seed in 0..50 {
            let mut s = SparseRecovery::new(4, 0.05, seed).unwrap();
            for key in 0..10u64 {
                s.update(key * 7919 + 3, 1);
            }
            if s.decode().is_some() {
                failures += 1;
            }
        }
        assert_eq!(failures, 0);
    }

    #[test]
    fn negative_and_large_keys() {
        let mut s = SparseRecovery::new(3, 0.01, 4).unwrap();
        s.update(u64::MAX - 1, -2);
        s.update(1 << 62, 5);
        assert_eq!(s.decode(), Some(vec![(1 << 62, 5), (u64::MAX - 1, -2)]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SparseRecovery::new(0, 0.1, 0).is_err());
        assert!(SparseRecovery::new(2, 1.0, 0).is_err());
    }
}
