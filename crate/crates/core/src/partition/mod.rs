//! Bounded-diameter partitions: the almost-dense decomposition, ball-carving
//! sparse partitions and lattice-based consistent hashing.

mod decomposition;
mod hashing;
mod sparse;

pub use decomposition::{almost_dense_decomposition, dense_threshold, sparse_weight_bound};
pub use hashing::{partition_from_hash, BucketId, ConsistentHash};
pub use sparse::{measure_sparsity, sparse_partition, SparsePartition};

use crate::metric::{MetricSpace, WeightedPointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartTag {
    /// A cluster of weight at least the dense threshold.
    Dense,
    /// A cluster below the dense threshold.
    Sparse1,
    /// A singleton holding outlier or far weight.
    Sparse2,
    /// A part with no density classification (e.g. a hash bucket).
    Plain,
}

impl PartTag {
    pub fn is_sparse(self) -> bool {
        matches!(self, PartTag::Sparse1 | PartTag::Sparse2)
    }
}

/// One part: `(support index, weight)` pairs into the partitioned set. A point's
/// weight may be split across parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub members: Vec<(usize, f64)>,
    pub tag: PartTag,
}

impl Part {
    pub fn weight(&self) -> f64 {
        self.members.iter().map(|m| m.1).sum()
    }
}

/// A partition of a weighted set into parts of diameter at most `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedPartition {
    pub parts: Vec<Part>,
    pub lambda: f64,
}

impl BoundedPartition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Union of the parts accepted by `keep`, as a weighted subset of `x`.
    pub fn collect(&self, x: &WeightedPointSet, keep: impl Fn(PartTag) -> bool) -> WeightedPointSet {
        let mut out = WeightedPointSet::new();
        for part in self.parts.iter().filter(|p| keep(p.tag)) {
            for &(i, w) in &part.members {
                out.insert(x.point(i).clone(), w);
            }
        }
        out
    }

    pub fn part_set(&self, x: &WeightedPointSet, part: usize) -> WeightedPointSet {
        x.select(self.parts[part].members.iter().copied())
    }

    pub fn dense(&self, x: &WeightedPointSet) -> WeightedPointSet {
        self.collect(x, |t| t == PartTag::Dense)
    }

    pub fn sparse(&self, x: &WeightedPointSet) -> WeightedPointSet {
        self.collect(x, PartTag::is_sparse)
    }

    pub fn weight_with(&self, keep: impl Fn(PartTag) -> bool) -> f64 {
        self.parts.iter().filter(|p| keep(p.tag)).map(Part::weight).sum()
    }

    pub fn count_with(&self, keep: impl Fn(PartTag) -> bool) -> usize {
        self.parts.iter().filter(|p| keep(p.tag)).count()
    }

    /// Largest part diameter, by exact pairwise scan.
    pub fn max_diameter(&self, metric: &MetricSpace, x: &WeightedPointSet) -> f64 {
        self.parts
            .iter()
            .map(|p| crate::metric::diameter_of(metric, p.members.iter().map(|&(i, _)| x.point(i))))
            .fold(0.0, f64::max)
    }

    /// Every support point's weight is covered exactly once (within tolerance).
    pub fn covers(&self, x: &WeightedPointSet) -> bool {
        let mut acc = vec![0.0; x.len()];
        for p in &self.parts {
            for &(i, w) in &p.members {
                if i >= acc.len() {
                    return false;
                }
                acc[i] += w;
            }
        }
        acc.iter()
            .zip(x.weights())
            .all(|(a, w)| (a - w).abs() <= crate::metric::TOL * w.max(1.0))
    }
}
