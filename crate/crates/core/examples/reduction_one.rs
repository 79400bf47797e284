//! Offline robust coreset by decomposition: dense parts go to a vanilla builder,
//! sparse parts are kept verbatim. Verified by exhaustive enumeration.

use robust_coreset::approx::tri_criteria;
use robust_coreset::bench::{gen_dataset, DatasetSpec};
use robust_coreset::objective::{check_coreset, default_pool, CheckSpec};
use robust_coreset::reduction::{reduction_one, ReductionConfig};
use robust_coreset::vanilla::SensitivityBuilder;
use robust_coreset::MetricSpace;

fn main() -> robust_coreset::Result<()> {
    let spec = DatasetSpec { n: 2000, satellites: 2.0, seed: 11, ..Default::default() };
    let (k, z, m, eps) = (2, 1, 3.0, 0.2);
    let x = gen_dataset(&spec, k, m as usize)?;
    let metric = MetricSpace::euclidean(2);
    let sol = tri_criteria(&metric, &x, k, z, m, 1)?;
    let cfg = ReductionConfig::new(k, z, m, eps).with_seed(1);
    let out = reduction_one(&metric, &x, &cfg, &SensitivityBuilder::with_samples(400), &sol)?;
    let r = &out.report;
    println!("lambda {:.4}, dense weight {}, sparse weight {} (bound {:.1})", r.lambda, r.dense_weight, r.sparse_weight, r.sparse_bound);
    println!("coreset: {} points = {} from the dense coreset + {} verbatim", out.coreset.size(), r.dense_coreset_size, r.verbatim_size);
    let check = check_coreset(&metric, &x, &out.coreset.weighted, &CheckSpec::new(k, z, m, eps), &default_pool(&metric, &x, 0))?;
    println!("max relative error {:.4} over {} center sets: pass = {}", check.max_rel_error, check.subsets_checked, check.pass);
    Ok(())
}
