use crate::approx::TriCriteriaSolution;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};
use crate::partition::{almost_dense_decomposition, sparse_weight_bound, PartTag};
use crate::vanilla::{Coreset, Provenance, VanillaBuilder};

use super::{lambda_one, ReductionConfig, ReductionOutput, ReductionReport};

pub(crate) fn exact_output(x: &WeightedPointSet, cfg: &ReductionConfig, builder: &str, pipeline: &str, mut report: ReductionReport) -> ReductionOutput {
    report.exact = true;
    report.verbatim_size = x.len();
    ReductionOutput {
        coreset: Coreset {
            weighted: x.clone(),
            provenance: provenance(cfg, builder, pipeline),
        },
        report,
    }
}

pub(crate) fn provenance(cfg: &ReductionConfig, builder: &str, pipeline: &str) -> Provenance {
    Provenance {
        builder: builder.to_string(),
        reduction: pipeline.to_string(),
        eps_target: cfg.eps,
        eta_budget: 0.0,
        seed: cfg.seed,
    }
}

/// Dense parts go through the vanilla builder; sparse parts are kept verbatim.
///
/// Asserts the decomposition guarantees on every run: parts are
/// `2 lambda`-bounded and the sparse weight stays within
/// [`sparse_weight_bound`]. A violation is reported as [`Error::Invariant`].
pub fn reduction_one(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    cfg: &ReductionConfig,
    builder: &dyn VanillaBuilder,
    sol: &TriCriteriaSolution,
) -> Result<ReductionOutput> {
    cfg.validate()?;
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate_for(metric)?;
    const NAME: &str = "reduction-one";
    let outlier_cost = sol.outlier_cost(metric, x, cfg.z, cfg.m)?;
    let alpha = cfg.alpha(sol);
    let mut report = ReductionReport {
        pipeline: NAME.into(),
        eps_in: cfg.eps_in(),
        alpha,
        outlier_cost,
        ..Default::default()
    };
    if outlier_cost <= 0.0 {
        return Ok(exact_output(x, cfg, builder.name(), NAME, report));
    }
    let lambda = lambda_one(cfg, outlier_cost, alpha);
    let eps_in = cfg.eps_in();
    let part = almost_dense_decomposition(metric, x, sol, lambda, eps_in, cfg.m)?;
    let dense = part.dense(x);
    let sparse = part.sparse(x);

    report.lambda = lambda;
    report.dense_weight = dense.total_weight();
    report.sparse_weight = part.weight_with(PartTag::is_sparse);
    report.sparse2_weight = part.weight_with(|t| t == PartTag::Sparse2);
    report.sparse_bound = sparse_weight_bound(sol, cfg.k, eps_in, cfg.m, cfg.z, outlier_cost, lambda);
    report.max_part_diameter = part.max_diameter(metric, x);
    check_decomposition(&report, part.lambda, sol, cfg, part.count_with(|t| matches!(t, PartTag::Dense | PartTag::Sparse1)))?;

    let s_dense = if dense.is_empty() {
        WeightedPointSet::new()
    } else {
        builder.build(metric, &dense, cfg.k, cfg.z, eps_in, cfg.seed)?.weighted
    };
    report.dense_coreset_size = s_dense.len();
    report.verbatim_size = sparse.len();
    report.partition = Some(part);
    Ok(ReductionOutput {
        coreset: Coreset {
            weighted: s_dense.union(&sparse),
            provenance: provenance(cfg, builder.name(), NAME),
        },
        report,
    })
}

pub(crate) fn check_decomposition(report: &ReductionReport, bound: f64, sol: &TriCriteriaSolution, cfg: &ReductionConfig, clusters: usize) -> Result<()> {
    if report.max_part_diameter > bound + 1e-9 * bound.max(1.0) {
        return Err(Error::Invariant(format!(
            "part diameter {} exceeds 2 lambda = {bound}",
            report.max_part_diameter
        )));
    }
    if report.sparse_weight > report.sparse_bound * (1.0 + 1e-9) + 1e-9 {
        return Err(Error::Invariant(format!(
            "sparse weight {} exceeds bound {}",
            report.sparse_weight, report.sparse_bound
        )));
    }
    if clusters > sol.beta * cfg.k {
        return Err(Error::Invariant(format!("{clusters} clusters exceed beta k = {}", sol.beta * cfg.k)));
    }
    Ok(())
}
