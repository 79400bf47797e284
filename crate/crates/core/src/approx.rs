//! Tri-criteria approximation: `beta*k` centers whose cost with `gamma*m`
//! outliers is within a factor `alpha` of the optimal `m`-outlier cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};
use crate::objective::{greedy_removal, robust_cost, CenterSet};

/// Center blow-up of [`tri_criteria`].
pub const BETA: usize = 2;
/// Outlier blow-up of [`tri_criteria`].
pub const GAMMA: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TriCriteriaSolution {
    pub centers: CenterSet,
    pub beta: usize,
    pub gamma: usize,
    /// `cost^(gamma m)(X, centers) / OPT` once measured against a reference optimum.
    pub alpha_measured: Option<f64>,
}

impl TriCriteriaSolution {
    /// Wraps externally chosen centers (e.g. an exact optimum) with `beta = gamma = 1`.
    pub fn exact(centers: CenterSet) -> Self {
        TriCriteriaSolution {
            centers,
            beta: 1,
            gamma: 1,
            alpha_measured: Some(1.0),
        }
    }

    /// `cost^(gamma m)(X, centers)`, with the budget capped at the total weight.
    pub fn outlier_cost(&self, metric: &MetricSpace, x: &WeightedPointSet, z: u32, m: f64) -> Result<f64> {
        let h = (self.gamma as f64 * m).min(x.total_weight());
        Ok(robust_cost(metric, x, &self.centers, z, h)?.value)
    }
}

/// Outlier-excluding `D^z` sampling.
///
/// Draws `beta*k = 2k` centers: the first proportionally to weight, each later
/// one proportionally to `w'(x) dist(x, C)^z`, where `w'` is the weight left
/// after greedily discarding weight `gamma*m = 2m` farthest from the current
/// centers. Stops early once every remaining point is covered.
pub fn tri_criteria(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    k: usize,
    z: u32,
    m: f64,
    seed: u64,
) -> Result<TriCriteriaSolution> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if z == 0 {
        return Err(Error::Parameter("z must be at least 1".into()));
    }
    if !(m >= 0.0) {
        return Err(Error::Parameter(format!("m = {m} must be nonnegative")));
    }
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate_for(metric)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.len();
    let excluded = (GAMMA as f64 * m).min(x.total_weight());

    let mut chosen = Vec::with_capacity(BETA * k);
    let mut dist = vec![f64::INFINITY; n];
    let mut sampling: Vec<f64> = x.weights().to_vec();
    for _ in 0..BETA * k {
        let Some(i) = sample_index(&mut rng, &sampling) else {
            break;
        };
        chosen.push(i);
        let c = x.point(i);
        for (j, d) in dist.iter_mut().enumerate() {
            *d = d.min(metric.dist(x.point(j), c));
        }
        let removed = greedy_removal(&dist, x.weights(), excluded);
        for j in 0..n {
            sampling[j] = (x.weight(j) - removed[j]).max(0.0) * dist[j].powi(z as i32);
        }
    }
    Ok(TriCriteriaSolution {
        centers: chosen.iter().map(|&i| x.point(i).clone()).collect(),
        beta: BETA,
        gamma: GAMMA,
        alpha_measured: None,
    })
}

/// Draws an index proportionally to nonnegative weights; `None` when all are zero.
pub(crate) fn sample_index(rng: &mut impl Rng, weights: &[f64]) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if target < w {
                return Some(i);
            }
            target -= w;
            last = Some(i);
        }
    }
    last
}

/// Measures `alpha = cost^(gamma m)(X, sol) / reference_opt` and stores it.
///
/// A zero reference with positive solution cost gives `f64::INFINITY`; zero
/// over zero counts as optimal (`1.0`).
pub fn validate_tri_criteria(
    sol: &mut TriCriteriaSolution,
    metric: &MetricSpace,
    x: &WeightedPointSet,
    k: usize,
    z: u32,
    m: f64,
    reference_opt: f64,
) -> Result<f64> {
    if sol.centers.len() > sol.beta * k {
        return Err(Error::Invariant(format!(
            "{} centers exceed beta*k = {}",
            sol.centers.len(),
            sol.beta * k
        )));
    }
    let c = sol.outlier_cost(metric, x, z, m)?;
    let alpha = alpha_ratio(c, reference_opt);
    sol.alpha_measured = Some(alpha);
    Ok(alpha)
}

pub(crate) fn alpha_ratio(cost: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        cost / opt
    } else if cost > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;
    use crate::objective::{brute_force_opt, DEFAULT_BUDGET};

    const L: MetricSpace = MetricSpace::EuclideanLp { d: 1, p: 2.0 };

    fn multi(groups: &[(f64, usize)]) -> WeightedPointSet {
        WeightedPointSet::unit(
            groups
                .iter()
                .flat_map(|&(v, c)| std::iter::repeat_n(Point::coords(vec![v]), c)),
        )
    }

    #[test]
    fn two_clusters_are_covered() {
        let x = multi(&[(0.0, 5), (100.0, 5)]);
        for seed in 0..20 {
            let sol = tri_criteria(&L, &x, 2, 1, 0.0, seed).unwrap();
            assert_eq!(sol.outlier_cost(&L, &x, 1, 0.0).unwrap(), 0.0);
            assert!(sol.centers.len() <= 4);
        }
    }

    #[test]
    fn far_outlier_is_excluded() {
        let x = multi(&[(0.0, 5), (100.0, 5), (1e6, 1)]);
        for seed in 0..20 {
            let sol = tri_criteria(&L, &x, 2, 1, 1.0, seed).unwrap();
            assert_eq!(sol.outlier_cost(&L, &x, 1, 1.0).unwrap(), 0.0, "seed {seed}");
        }
    }

    #[test]
    fn few_points_become_centers() {
        let x = multi(&[(0.0, 1), (3.0, 1), (8.0, 1)]);
        let sol = tri_criteria(&L, &x, 2, 2, 0.0, 7).unwrap();
        assert_eq!(sol.outlier_cost(&L, &x, 2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let x = multi(&[(0.0, 3), (1.0, 2), (5.0, 4), (9.0, 1), (20.0, 1)]);
        let a = tri_criteria(&L, &x, 2, 1, 1.0, 42).unwrap();
        let b = tri_criteria(&L, &x, 2, 1, 1.0, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_k() {
        let x = multi(&[(0.0, 1)]);
        assert!(matches!(tri_criteria(&L, &x, 0, 1, 0.0, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn alpha_ratio_cases() {
        assert_eq!(alpha_ratio(6.0, 3.0), 2.0);
        assert_eq!(alpha_ratio(3.0, 3.0), 1.0);
        assert_eq!(alpha_ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(alpha_ratio(0.0, 0.0), 1.0);
    }

    #[test]
    fn optimal_solution_measures_one() {
        let x = multi(&[(0.0, 2), (1.0, 1), (10.0, 2), (50.0, 1)]);
        let (opt, c) = brute_force_opt(&L, &x, 2, 1, 1.0, x.points(), DEFAULT_BUDGET).unwrap();
        let mut sol = TriCriteriaSolution::exact(c);
        let a = validate_tri_criteria(&mut sol, &L, &x, 2, 1, 1.0, opt).unwrap();
        assert_eq!(a, 1.0);
        assert_eq!(sol.alpha_measured, Some(1.0));
    }
}
