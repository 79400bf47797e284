//! Robust coresets by reduction to vanilla builders.
//!
//! [`reduction_one`] keeps every point of the sparse parts of an almost-dense
//! decomposition and hands the dense remainder to the vanilla builder.
//! [`reduction_two`] additionally compresses the sparse clusters with a
//! size-preserving coreset built in a separated duplication of the space.

mod one;
mod outliers;
mod size_preserving;
mod two;

pub use one::reduction_one;
pub use outliers::{significant_outliers, Allocation, OutlierEntry, SignificantOutlierReport};
pub use size_preserving::{calibrate_weights, size_preserving_build, SizePreserving};
pub use two::reduction_two;

use crate::approx::TriCriteriaSolution;
use crate::error::{Error, Result};
use crate::partition::BoundedPartition;
use crate::vanilla::Coreset;

/// Parameters shared by both reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionConfig {
    pub k: usize,
    pub z: u32,
    pub m: f64,
    /// Target accuracy; internal steps run at `eps / c_scale`.
    pub eps: f64,
    /// Exponent in the `(z+1)^-xi` factor of the partition diameter.
    pub xi: f64,
    pub c_scale: f64,
    pub seed: u64,
}

impl ReductionConfig {
    pub fn new(k: usize, z: u32, m: f64, eps: f64) -> Self {
        ReductionConfig {
            k,
            z,
            m,
            eps,
            xi: 3.0,
            c_scale: 4.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn eps_in(&self) -> f64 {
        self.eps / self.c_scale
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.z == 0 {
            return Err(Error::Parameter("k and z must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Parameter(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return Err(Error::Parameter(format!("m = {} must be finite and nonnegative", self.m)));
        }
        if !(self.xi >= 0.0) || !(self.c_scale >= 1.0) {
            return Err(Error::Parameter("xi must be >= 0 and c_scale >= 1".into()));
        }
        Ok(())
    }

    /// `alpha` used in the diameter formulas: the measured value when finite, else `2^z`.
    pub fn alpha(&self, sol: &TriCriteriaSolution) -> f64 {
        match sol.alpha_measured {
            Some(a) if a.is_finite() && a >= 1.0 => a,
            Some(a) if a.is_finite() && a > 0.0 => 1.0,
            _ => 2f64.powi(self.z as i32),
        }
    }
}

/// Measurements taken while running a reduction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionReport {
    pub pipeline: String,
    pub eps_in: f64,
    pub alpha: f64,
    /// `cost^(gamma m)(X, C*)`.
    pub outlier_cost: f64,
    /// Diameter parameter handed to the decomposition (parts are `2 lambda`-bounded).
    pub lambda: f64,
    pub dense_weight: f64,
    pub sparse_weight: f64,
    pub sparse2_weight: f64,
    pub sparse_bound: f64,
    pub sparse2_bound: f64,
    pub max_part_diameter: f64,
    pub dense_coreset_size: usize,
    /// Distinct points copied verbatim into the coreset.
    pub verbatim_size: usize,
    pub partition: Option<BoundedPartition>,
    pub mu: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda_measured: Option<usize>,
    pub k_prime: Option<usize>,
    pub sparse1_coreset_size: usize,
    /// `max_Q |w_S(S ∩ Q) / |Q| - 1|` before calibration.
    pub part_weight_max_dev: Option<f64>,
    /// True when the zero-cost shortcut returned the input itself.
    pub exact: bool,
}

/// Output of a reduction pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutput {
    pub coreset: Coreset,
    pub report: ReductionReport,
}

/// `(z+1)^-xi (eps cost / (alpha m))^(1/z)`; infinite when `m = 0`.
pub fn lambda_one(cfg: &ReductionConfig, outlier_cost: f64, alpha: f64) -> f64 {
    if cfg.m == 0.0 {
        return f64::INFINITY;
    }
    let z = cfg.z as f64;
    (z + 1.0).powf(-cfg.xi) * (cfg.eps_in() * outlier_cost / (alpha * cfg.m)).powf(1.0 / z)
}

/// `(z+1)^-xi eps^2 (cost / (alpha m))^(1/z) / log(k m / eps)`, with the
/// natural logarithm floored at 1; infinite when `m = 0`.
pub fn lambda_two(cfg: &ReductionConfig, outlier_cost: f64, alpha: f64) -> f64 {
    if cfg.m == 0.0 {
        return f64::INFINITY;
    }
    let z = cfg.z as f64;
    let e = cfg.eps_in();
    let log = (cfg.k as f64 * cfg.m / e).ln().max(1.0);
    (z + 1.0).powf(-cfg.xi) * e * e * (outlier_cost / (alpha * cfg.m)).powf(1.0 / z) / log
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::tri_criteria;
    use crate::metric::{MetricSpace, Point, WeightedPointSet};
    use crate::objective::{check_coreset, default_pool, CenterSet, CheckSpec};
    use crate::vanilla::IdentityBuilder;

    fn line(v: &[f64]) -> WeightedPointSet {
        WeightedPointSet::unit(v.iter().map(|x| Point::coords(vec![*x])))
    }

    fn sample() -> WeightedPointSet {
        let mut v: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        v.extend((0..12).map(|i| 20.0 + i as f64 * 0.1));
        v.extend([60.0, -45.0]);
        line(&v)
    }

    #[test]
    fn lambda_formulas() {
        let cfg = ReductionConfig::new(2, 1, 4.0, 0.4);
        assert!((lambda_one(&cfg, 800.0, 1.0) - 2.5).abs() < 1e-12);
        assert_eq!(lambda_one(&ReductionConfig::new(2, 1, 0.0, 0.4), 5.0, 1.0), f64::INFINITY);
        let l2 = lambda_two(&cfg, 800.0, 1.0);
        assert!((l2 - 0.125 * 0.01 * 200.0 / 80f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn alpha_fallbacks() {
        let cfg = ReductionConfig::new(1, 2, 1.0, 0.5);
        let mut sol = TriCriteriaSolution::exact(CenterSet::new(vec![Point::coords(vec![0.0])]));
        assert_eq!(cfg.alpha(&sol), 1.0);
        sol.alpha_measured = Some(0.5);
        assert_eq!(cfg.alpha(&sol), 1.0);
        sol.alpha_measured = None;
        assert_eq!(cfg.alpha(&sol), 4.0);
    }

    #[test]
    fn identity_builder_gives_exact_coreset() {
        let m = MetricSpace::euclidean(1);
        let x = sample();
        let cfg = ReductionConfig::new(2, 1, 2.0, 0.4).with_seed(3);
        let sol = tri_criteria(&m, &x, 2, 1, 2.0, 3).unwrap();
        let spec = CheckSpec::new(2, 1, 2.0, 0.4);
        let pool = default_pool(&m, &x, 0);
        for out in [
            reduction_one(&m, &x, &cfg, &IdentityBuilder, &sol).unwrap(),
            reduction_two(&m, &x, &cfg, &IdentityBuilder, &sol).unwrap(),
        ] {
            assert!((out.coreset.weighted.total_weight() - x.total_weight()).abs() < 1e-9);
            let r = check_coreset(&m, &x, &out.coreset.weighted, &spec, &pool).unwrap();
            assert!(r.pass, "{}: {}", out.report.pipeline, r.max_rel_error);
        }
    }

    #[test]
    fn zero_cost_returns_input() {
        let m = MetricSpace::euclidean(1);
        let x = line(&[0.0, 0.0, 5.0]);
        let sol = TriCriteriaSolution::exact(CenterSet::new(vec![Point::coords(vec![0.0]), Point::coords(vec![5.0])]));
        let cfg = ReductionConfig::new(2, 2, 1.0, 0.3);
        let out = reduction_one(&m, &x, &cfg, &IdentityBuilder, &sol).unwrap();
        assert!(out.report.exact);
        assert_eq!(out.coreset.weighted, x);
    }

    #[test]
    fn no_outliers_means_no_far_points() {
        let m = MetricSpace::euclidean(1);
        let x = sample();
        let cfg = ReductionConfig::new(2, 1, 0.0, 0.4);
        let sol = tri_criteria(&m, &x, 2, 1, 0.0, 9).unwrap();
        let out = reduction_one(&m, &x, &cfg, &IdentityBuilder, &sol).unwrap();
        assert_eq!(out.report.lambda, f64::INFINITY);
        assert_eq!(out.report.sparse2_weight, 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let m = MetricSpace::euclidean(1);
        let x = sample();
        let sol = tri_criteria(&m, &x, 1, 1, 0.0, 0).unwrap();
        for cfg in [ReductionConfig::new(0, 1, 1.0, 0.3), ReductionConfig::new(1, 1, 1.0, 1.5), ReductionConfig::new(1, 1, -1.0, 0.3)] {
            assert!(matches!(reduction_one(&m, &x, &cfg, &IdentityBuilder, &sol), Err(Error::Parameter(_))));
        }
    }
}
