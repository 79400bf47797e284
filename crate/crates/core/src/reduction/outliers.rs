use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};
use crate::objective::{greedy_removal, CenterSet};
use crate::partition::BoundedPartition;

/// A weighted occurrence of a support point inside one part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierEntry {
    pub point: usize,
    pub part: usize,
    /// Initial weight (`w_out` or `w_in`).
    pub weight: f64,
    /// Weight left when the elimination loop stops (`w_Z` or `w_U`).
    pub left: f64,
}

/// `a_{q,p}`: weight of outlier entry `q` eliminated by inlier entry `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub q: usize,
    pub p: usize,
    pub amount: f64,
}

/// Significant outliers and the auxiliary centers covering them.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificantOutlierReport {
    pub outliers: Vec<OutlierEntry>,
    pub inliers: Vec<OutlierEntry>,
    pub allocations: Vec<Allocation>,
    /// Outlier weight no inlier could eliminate.
    pub significant: WeightedPointSet,
    /// One point of every part that still holds significant weight.
    pub c_aux: CenterSet,
    /// `w_in(A)` for `A = {x in X_in : dist(x, C_aux) <= dist(x, C) + 4 lambda}`.
    pub a_weight: f64,
    /// `cost(X_out - Z, C)`.
    pub nonsignificant_cost: f64,
    /// `sum a_{q,p} (2 dist(p, C) + 4 lambda)^z`.
    pub nonsignificant_bound: f64,
}

impl SignificantOutlierReport {
    pub fn total_allocated(&self) -> f64 {
        self.allocations.iter().map(|a| a.amount).sum()
    }
}

/// Splits every part into its `h_i`-outlier and inlier weight with respect to
/// `C`, then lets inliers eliminate outliers whenever
/// `dist(p, q) <= dist(p, C) + 4 lambda`, greedily in index order. Whatever
/// outlier weight survives is significant.
pub fn significant_outliers(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    c: &CenterSet,
    z: u32,
    lambda: f64,
    partition: &BoundedPartition,
    h: &[f64],
) -> Result<SignificantOutlierReport> {
    if c.is_empty() {
        return Err(Error::EmptyCenters);
    }
    if h.len() != partition.len() {
        return Err(Error::Parameter(format!("{} budgets for {} parts", h.len(), partition.len())));
    }
    let dist_c: Vec<f64> = x.points().iter().map(|p| c.dist(metric, p)).collect();
    let mut outliers = Vec::new();
    let mut inliers = Vec::new();
    for (pi, (part, &hi)) in partition.parts.iter().zip(h).enumerate() {
        let pw = part.weight();
        if hi > pw + 1e-9 {
            return Err(Error::Infeasible { h: hi, total: pw });
        }
        let d: Vec<f64> = part.members.iter().map(|&(i, _)| dist_c[i]).collect();
        let w: Vec<f64> = part.members.iter().map(|&(_, w)| w).collect();
        let removed = greedy_removal(&d, &w, hi.min(pw));
        for (j, &(i, wi)) in part.members.iter().enumerate() {
            if removed[j] > 0.0 {
                outliers.push(OutlierEntry { point: i, part: pi, weight: removed[j], left: removed[j] });
            }
            let rest = wi - removed[j];
            if rest > 0.0 {
                inliers.push(OutlierEntry { point: i, part: pi, weight: rest, left: rest });
            }
        }
    }

    let mut allocations = Vec::new();
    for qi in 0..outliers.len() {
        for pi in 0..inliers.len() {
            if outliers[qi].left <= 0.0 {
                break;
            }
            if inliers[pi].left <= 0.0 {
                continue;
            }
            let (q, p) = (outliers[qi].point, inliers[pi].point);
            if metric.dist(x.point(p), x.point(q)) <= dist_c[p] + 4.0 * lambda {
                let a = outliers[qi].left.min(inliers[pi].left);
                outliers[qi].left -= a;
                inliers[pi].left -= a;
                allocations.push(Allocation { q: qi, p: pi, amount: a });
            }
        }
    }

    let mut significant = WeightedPointSet::new();
    let mut aux_of_part: Vec<Option<usize>> = vec![None; partition.len()];
    for o in &outliers {
        if o.left > 0.0 {
            significant.insert(x.point(o.point).clone(), o.left);
            aux_of_part[o.part].get_or_insert(o.point);
        }
    }
    let c_aux: CenterSet = aux_of_part.iter().flatten().map(|&i| x.point(i).clone()).collect();
    let a_weight = inliers
        .iter()
        .filter(|e| !c_aux.is_empty() && c_aux.dist(metric, x.point(e.point)) <= dist_c[e.point] + 4.0 * lambda)
        .map(|e| e.weight)
        .sum();
    let zi = z as i32;
    let nonsignificant_cost = outliers
        .iter()
        .map(|o| (o.weight - o.left) * dist_c[o.point].powi(zi))
        .sum();
    let nonsignificant_bound = allocations
        .iter()
        .map(|a| a.amount * (2.0 * dist_c[inliers[a.p].point] + 4.0 * lambda).powi(zi))
        .sum();
    Ok(SignificantOutlierReport {
        outliers,
        inliers,
        allocations,
        significant,
        c_aux,
        a_weight,
        nonsignificant_cost,
        nonsignificant_bound,
    })
}
