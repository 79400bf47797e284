//! Offline robust coreset through a size-preserving vanilla coreset: parts of a
//! sparse partition are moved to separated copies, summarized for k' centers,
//! and the weights are calibrated to the true part sizes.

use robust_coreset::approx::tri_criteria;
use robust_coreset::bench::{gen_dataset, DatasetSpec};
use robust_coreset::objective::{check_coreset, default_pool, CheckSpec};
use robust_coreset::reduction::{reduction_two, ReductionConfig};
use robust_coreset::vanilla::SensitivityBuilder;
use robust_coreset::MetricSpace;

fn main() -> robust_coreset::Result<()> {
    let spec = DatasetSpec { n: 2000, seed: 3, ..Default::default() };
    let (k, z, m, eps) = (2, 2, 2.0, 0.2);
    let x = gen_dataset(&spec, k, m as usize)?;
    let metric = MetricSpace::euclidean(2);
    let sol = tri_criteria(&metric, &x, k, z, m, 7)?;
    let cfg = ReductionConfig::new(k, z, m, eps).with_seed(7);
    let out = reduction_two(&metric, &x, &cfg, &SensitivityBuilder::with_samples(60), &sol)?;
    let r = &out.report;
    println!(
        "mu {:?}, Gamma {:?}, Lambda {:?}, k' {:?}, max part weight deviation before calibration {:?}",
        r.mu, r.gamma, r.lambda_measured, r.k_prime, r.part_weight_max_dev
    );
    println!("coreset: {} points ({} significant outliers kept verbatim)", out.coreset.size(), r.verbatim_size);
    let check = check_coreset(&metric, &x, &out.coreset.weighted, &CheckSpec::new(k, z, m, eps), &default_pool(&metric, &x, 0))?;
    println!("max relative error {:.4}: pass = {}", check.max_rel_error, check.pass);
    Ok(())
}
