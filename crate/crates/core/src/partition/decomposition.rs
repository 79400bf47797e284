use crate::approx::TriCriteriaSolution;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};
use crate::objective::greedy_removal;

use super::{BoundedPartition, Part, PartTag};

/// Minimum weight of a dense part: `ceil((1 + 1/eps) m)`.
pub fn dense_threshold(eps: f64, m: f64) -> f64 {
    ((1.0 + 1.0 / eps) * m - 1e-9).ceil().max(0.0)
}

/// Upper bound on the sparse weight of an almost-dense decomposition:
/// `beta k ceil((1+1/eps) m) + gamma m + cost^(gamma m)(X, C*) lambda^-z`.
pub fn sparse_weight_bound(sol: &TriCriteriaSolution, k: usize, eps: f64, m: f64, z: u32, outlier_cost: f64, lambda: f64) -> f64 {
    let far = if lambda.is_infinite() {
        0.0
    } else {
        outlier_cost / lambda.powi(z as i32)
    };
    (sol.beta * k) as f64 * dense_threshold(eps, m) + sol.gamma as f64 * m + far
}

/// Splits `X` around an approximate solution `C*`.
///
/// The `gamma m` weight farthest from `C*` and every point farther than
/// `lambda` become singleton `Sparse2` parts; the rest is clustered by nearest
/// center (lowest center index on ties), and each cluster is `Dense` when its
/// weight reaches [`dense_threshold`], `Sparse1` otherwise. A point straddling
/// the outlier boundary contributes its removed fraction to a `Sparse2`
/// singleton and the remainder to its cluster. The result is `2 lambda`-bounded.
pub fn almost_dense_decomposition(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    sol: &TriCriteriaSolution,
    lambda: f64,
    eps: f64,
    m: f64,
) -> Result<BoundedPartition> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda = {lambda} must be positive")));
    }
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps = {eps} must be positive")));
    }
    if sol.centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let n = x.len();
    let mut nearest = Vec::with_capacity(n);
    for p in x.points() {
        nearest.push(sol.centers.nearest(metric, p).ok_or(Error::EmptyCenters)?);
    }
    let dist: Vec<f64> = nearest.iter().map(|n| n.1).collect();
    let budget = (sol.gamma as f64 * m).min(x.total_weight());
    let removed = greedy_removal(&dist, x.weights(), budget);

    let mut clusters: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sol.centers.len()];
    let mut singletons = Vec::new();
    for i in 0..n {
        let w = x.weight(i);
        if dist[i] > lambda {
            singletons.push((i, w));
            continue;
        }
        if removed[i] > 0.0 {
            singletons.push((i, removed[i]));
        }
        let keep = w - removed[i];
        if keep > 0.0 {
            clusters[nearest[i].0].push((i, keep));
        }
    }
    let threshold = dense_threshold(eps, m);
    let mut parts = Vec::new();
    for members in clusters.into_iter().filter(|c| !c.is_empty()) {
        let w: f64 = members.iter().map(|m| m.1).sum();
        let tag = if w >= threshold - 1e-9 {
            PartTag::Dense
        } else {
            PartTag::Sparse1
        };
        parts.push(Part { members, tag });
    }
    for s in singletons {
        parts.push(Part {
            members: vec![s],
            tag: PartTag::Sparse2,
        });
    }
    Ok(BoundedPartition {
        parts,
        lambda: 2.0 * lambda,
    })
}
