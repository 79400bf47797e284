use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};

use super::{BoundedPartition, Part, PartTag};

/// A partition into parts of diameter at most `mu` such that every ball of
/// radius `mu / gamma` around a data point meets at most `lambda` parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePartition {
    pub partition: BoundedPartition,
    pub mu: f64,
    pub gamma: f64,
    /// Measured: the largest number of parts met by a ball of radius `mu / gamma`.
    pub lambda: usize,
}

/// Largest number of distinct parts met by `Ball(x, radius)` over data points `x`.
pub fn measure_sparsity(metric: &MetricSpace, x: &WeightedPointSet, part_of: &[usize], radius: f64) -> usize {
    let n = x.len();
    let mut seen = Vec::new();
    let mut best = 0;
    for i in 0..n {
        seen.clear();
        for j in 0..n {
            if metric.dist(x.point(i), x.point(j)) <= radius {
                seen.push(part_of[j]);
            }
        }
        seen.sort_unstable();
        seen.dedup();
        best = best.max(seen.len());
    }
    best
}

/// Greedy ball carving: repeatedly carve `Ball(x, mu/2)` around the unassigned
/// point whose ball holds the most unassigned points (lowest index on ties).
/// `Gamma` is fixed to `ceil(log2 n) + 1` and `Lambda` is measured afterwards.
pub fn sparse_partition(metric: &MetricSpace, x: &WeightedPointSet, mu: f64) -> Result<SparsePartition> {
    if !(mu > 0.0) {
        return Err(Error::Parameter(format!("mu = {mu} must be positive")));
    }
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = x.len();
    let r = mu / 2.0;
    let close: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| metric.dist(x.point(i), x.point(j)) <= r).collect())
        .collect();
    let mut part_of = vec![usize::MAX; n];
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let mut best = (0, usize::MAX);
        for i in (0..n).filter(|&i| part_of[i] == usize::MAX) {
            let c = close[i].iter().filter(|&&j| part_of[j] == usize::MAX).count();
            if best.1 == usize::MAX || c > best.0 {
                best = (c, i);
            }
        }
        let id = parts.len();
        let mut members = Vec::new();
        for &j in &close[best.1] {
            if part_of[j] == usize::MAX {
                part_of[j] = id;
                members.push((j, x.weight(j)));
                left -= 1;
            }
        }
        parts.push(Part {
            members,
            tag: PartTag::Plain,
        });
    }
    let gamma = (n as f64).log2().ceil() + 1.0;
    let lambda = measure_sparsity(metric, x, &part_of, mu / gamma);
    Ok(SparsePartition {
        partition: BoundedPartition { parts, lambda: mu },
        mu,
        gamma,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;

    const L: MetricSpace = MetricSpace::EuclideanLp { d: 1, p: 2.0 };

    #[test]
    fn singleton() {
        let x = WeightedPointSet::unit([Point::coords(vec![3.0])]);
        let q = sparse_partition(&L, &x, 1.0).unwrap();
        assert_eq!(q.partition.len(), 1);
        assert_eq!(q.lambda, 1);
    }

    #[test]
    fn one_ball_takes_all() {
        let x = WeightedPointSet::unit((0..10).map(|i| Point::coords(vec![i as f64 * 0.1])));
        let q = sparse_partition(&L, &x, 2.0).unwrap();
        assert_eq!(q.partition.len(), 1);
    }

    #[test]
    fn parts_are_bounded_and_cover() {
        let x = WeightedPointSet::unit((0..64).map(|i| Point::coords(vec![(i * 37 % 64) as f64])));
        let q = sparse_partition(&L, &x, 8.0).unwrap();
        assert!(q.partition.covers(&x));
        assert!(q.partition.max_diameter(&L, &x) <= 8.0);
    }

    #[test]
    fn rejects_bad_mu() {
        let x = WeightedPointSet::unit([Point::coords(vec![0.0])]);
        assert!(sparse_partition(&L, &x, 0.0).is_err());
    }
}
