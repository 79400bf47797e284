use std::collections::HashMap;

use crate::approx::TriCriteriaSolution;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, WeightedPointSet};
use crate::partition::{almost_dense_decomposition, sparse_partition, sparse_weight_bound, PartTag};
use crate::vanilla::{Coreset, VanillaBuilder};

use super::one::{check_decomposition, exact_output, provenance};
use super::size_preserving::{build_on_partition, calibrate_weights};
use super::{lambda_two, ReductionConfig, ReductionOutput, ReductionReport};

/// Dense parts go through the vanilla builder, sparse clusters through the
/// size-preserving builder with calibrated weights, and the outlier / far
/// singletons are kept verbatim.
///
/// The sparse clusters are partitioned with diameter `mu = 1000 z Gamma lambda / eps`
/// and the duplicated build uses `k' = (k + beta k Lambda + beta k) Lambda`
/// with the measured `Lambda` of that partition.
pub fn reduction_two(
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
    const NAME: &str = "reduction-two";
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
    let eps_in = cfg.eps_in();
    let lambda = lambda_two(cfg, outlier_cost, alpha);
    let part = almost_dense_decomposition(metric, x, sol, lambda, eps_in, cfg.m)?;
    let dense = part.dense(x);
    let sparse1 = part.collect(x, |t| t == PartTag::Sparse1);
    let sparse2 = part.collect(x, |t| t == PartTag::Sparse2);

    report.lambda = lambda;
    report.dense_weight = dense.total_weight();
    report.sparse_weight = part.weight_with(PartTag::is_sparse);
    report.sparse2_weight = sparse2.total_weight();
    report.sparse_bound = sparse_weight_bound(sol, cfg.k, eps_in, cfg.m, cfg.z, outlier_cost, lambda);
    report.sparse2_bound = sol.gamma as f64 * cfg.m
        + if lambda.is_finite() {
            outlier_cost / lambda.powi(cfg.z as i32)
        } else {
            0.0
        };
    report.max_part_diameter = part.max_diameter(metric, x);
    check_decomposition(&report, part.lambda, sol, cfg, part.count_with(|t| matches!(t, PartTag::Dense | PartTag::Sparse1)))?;
    if report.sparse2_weight > report.sparse2_bound * (1.0 + 1e-9) + 1e-9 {
        return Err(Error::Invariant(format!(
            "singleton weight {} exceeds bound {}",
            report.sparse2_weight, report.sparse2_bound
        )));
    }

    let s_dense = if dense.is_empty() {
        WeightedPointSet::new()
    } else {
        builder.build(metric, &dense, cfg.k, cfg.z, eps_in, cfg.seed)?.weighted
    };
    report.dense_coreset_size = s_dense.len();

    let s_sparse1 = if sparse1.is_empty() {
        WeightedPointSet::new()
    } else {
        let gamma = (sparse1.len() as f64).log2().ceil() + 1.0;
        let mu = 1000.0 * cfg.z as f64 * gamma * lambda / eps_in;
        // Lambda is only known once the partition exists; k' uses the measured value.
        let q = sparse_partition(metric, &sparse1, mu)?;
        let big_lambda = q.lambda;
        let bk = sol.beta * cfg.k;
        let k_prime = (cfg.k + bk * big_lambda + bk) * big_lambda;
        let sp = build_on_partition(metric, &sparse1, q, k_prime, eps_in, cfg.z, builder, cfg.seed.wrapping_add(1))?;
        report.mu = Some(mu);
        report.gamma = Some(sp.partition.gamma);
        report.lambda_measured = Some(sp.partition.lambda);
        report.k_prime = Some(k_prime);
        report.part_weight_max_dev = Some(sp.max_part_deviation());
        let s1 = &sparse1;
        let index: HashMap<&Point, usize> = sp
            .partition
            .partition
            .parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.members.iter().map(move |&(j, _)| (s1.point(j), i)))
            .collect();
        calibrate_weights(&sp.coreset.weighted, |p| index.get(p).copied(), &sp.part_sizes)?
    };
    report.sparse1_coreset_size = s_sparse1.len();
    report.verbatim_size = sparse2.len();
    report.partition = Some(part);
    Ok(ReductionOutput {
        coreset: Coreset {
            weighted: s_dense.union(&s_sparse1).union(&sparse2),
            provenance: provenance(cfg, builder.name(), NAME),
        },
        report,
    })
}
