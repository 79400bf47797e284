use std::collections::HashMap;

use super::hash::{derive_index, derive_seed, splitmix64, UniversalHash};
use super::recovery::SparseRecovery;
use crate::error::Result;

const MAX_LEVEL: u32 = 48;
const LEVEL_BUDGET: usize = 8;
const SPLIT_BITS: u32 = 5;

fn sketch(seed: u64, delta: f64, tag: u64) -> SparseRecovery {
    SparseRecovery::new(LEVEL_BUDGET, delta, derive_index(seed, tag)).expect("parameters validated by the sampler")
}

fn level(rank: u64) -> u32 {
    rank.leading_zeros().min(MAX_LEVEL)
}

#[derive(Debug, Clone)]
struct RowLevel {
    rows: SparseRecovery,
    split: UniversalHash,
    /// `(bucket, column level)` -> sketch over column keys.
    cols: HashMap<(u64, u32), SparseRecovery>,
}

/// Linear sketch of a nonnegative integer matrix under additive updates that
/// returns a row chosen uniformly among the nonzero rows and then a column
/// chosen uniformly among the nonzero columns of that row.
///
/// Rows and columns carry pseudo-random ranks; the sample is the minimum-rank
/// nonzero row and, within it, the minimum-rank nonzero column. Geometric
/// subsampling by rank keeps each searched level sparse enough to decode, and
/// rows are split into buckets so a row's columns can be decoded in isolation.
#[derive(Debug, Clone)]
pub struct TwoLevelSampler {
    seed: u64,
    delta: f64,
    row_rank: u64,
    col_rank: u64,
    levels: Vec<Option<RowLevel>>,
}

impl TwoLevelSampler {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        SparseRecovery::new(LEVEL_BUDGET, delta, seed)?;
        Ok(TwoLevelSampler {
            seed,
            delta,
            row_rank: derive_seed(seed, "row-rank"),
            col_rank: derive_seed(seed, "col-rank"),
            levels: vec![None; MAX_LEVEL as usize + 1],
        })
    }

    fn rank_row(&self, row: u64) -> u64 {
        splitmix64(self.row_rank ^ row)
    }

    fn rank_col(&self, col: u64) -> u64 {
        splitmix64(self.col_rank ^ col)
    }

    pub fn update(&mut self, row: u64, col: u64, delta: i64) {
        if delta == 0 {
            return;
        }
        let lr = level(self.rank_row(row));
        let lc = level(self.rank_col(col));
        let (seed, d) = (self.seed, self.delta);
        for l in 0..=lr {
            let lvl = self.levels[l as usize].get_or_insert_with(|| RowLevel {
                rows: sketch(seed, d, l as u64),
                split: UniversalHash::new(derive_index(seed, 1000 + l as u64)),
                cols: HashMap::new(),
            });
            lvl.rows.update(row, delta);
            let b = lvl.split.bits(row, SPLIT_BITS);
            for c in 0..=lc {
                lvl.cols
                    .entry((b, c))
                    .or_insert_with(|| sketch(seed, d, ((l as u64 + 1) << 40) | (b << 8) | c as u64))
                    .update(col, delta);
            }
        }
    }

    /// `(row, col)` or `None` when the matrix is zero or decoding failed.
    pub fn sample(&self) -> Option<(u64, u64)> {
        for lvl in self.levels.iter().flatten() {
            let Some(rows) = lvl.rows.decode() else { continue };
            let live: Vec<u64> = rows.iter().filter(|(_, c)| *c > 0).map(|(r, _)| *r).collect();
            let Some(&row) = live.iter().min_by_key(|r| self.rank_row(**r)) else {
                return None;
            };
            let b = lvl.split.bits(row, SPLIT_BITS);
            if rows.iter().any(|(r, _)| *r != row && lvl.split.bits(*r, SPLIT_BITS) == b) {
                continue;
            }
            for c in 0..=MAX_LEVEL {
                let Some(sk) = lvl.cols.get(&(b, c)) else { break };
                let Some(cols) = sk.decode() else { continue };
                match cols.iter().filter(|(_, v)| *v > 0).map(|(k, _)| *k).min_by_key(|k| self.rank_col(*k)) {
                    Some(col) => return Some((row, col)),
                    None => break,
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let mut s = TwoLevelSampler::new(0.05, 3).unwrap();
        s.update(4, 17, 2);
        assert_eq!(s.sample(), Some((4, 17)));
    }

    #[test]
    fn empty_matrix_fails() {
        let mut s = TwoLevelSampler::new(0.05, 3).unwrap();
        assert_eq!(s.sample(), None);
        s.update(1, 1, 1);
        s.update(1, 1, -1);
        assert_eq!(s.sample(), None);
    }

    #[test]
    fn deleted_row_is_never_sampled() {
        for seed in 0..40 {
            let mut s = TwoLevelSampler::new(0.05, seed).unwrap();
            for c in 0..30 {
                s.update(1, c, 1);
            }
            s.update(2, 500, 1);
            for c in 0..30 {
                s.update(1, c, -1);
            }
            assert_eq!(s.sample(), Some((2, 500)));
        }
    }

    #[test]
    fn order_does_not_matter() {
        let mut ups: Vec<(u64, u64, i64)> = (0..200).map(|i| (i % 13, i * 31 % 97, 1)).collect();
        ups.extend((0..200).step_by(5).map(|i| (i % 13, i * 31 % 97, -1)));
        let mut fwd = TwoLevelSampler::new(0.05, 11).unwrap();
        let mut rev = TwoLevelSampler::new(0.05, 11).unwrap();
        for &(r, c, d) in &ups {
            fwd.update(r, c, d);
        }
        for &(r, c, d) in ups.iter().rev() {
            rev.update(r, c, d);
        }
        assert_eq!(fwd.sample(), rev.sample());
    }
}
