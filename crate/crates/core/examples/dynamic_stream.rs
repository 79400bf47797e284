//! Robust coresets over a dynamic stream with cancelling deletions.

use robust_coreset::bench::{gen_stream, DatasetSpec};
use robust_coreset::objective::{check_coreset, default_pool, CheckSpec};
use robust_coreset::streaming::{stream_reduction_one, stream_reduction_two, StreamConfig, VanillaStreamSpec};
use robust_coreset::MetricSpace;

fn main() -> robust_coreset::Result<()> {
    let spec = DatasetSpec { n: 220, spread: 3.0, outlier_distance: 20.0, delete_fraction: 0.3, seed: 4, ..Default::default() };
    let (k, z, m, eps) = (2, 1, 2, 0.3);
    let trace = gen_stream(&spec, k, m)?;
    let x = trace.stream.final_multiset()?;
    println!("{} updates ({} decoys), final support {}", trace.stream.len(), trace.decoys.len(), x.len());
    let vanilla = VanillaStreamSpec { samples: Some(40), ..Default::default() };
    let cfg = StreamConfig::new(k, z, m, eps, 0.05).with_seed(1).with_vanilla(vanilla);
    let metric = MetricSpace::euclidean(2);
    let pool = default_pool(&metric, &x, 6);
    for (name, out) in [("one", stream_reduction_one(&trace.stream, &cfg)?), ("two", stream_reduction_two(&trace.stream, &cfg)?)] {
        let r = &out.report;
        let check = check_coreset(&metric, &x, &out.coreset.weighted, &CheckSpec::new(k, z, m as f64, eps), &pool)?;
        println!(
            "stream-{name}: {} OPT guesses tried, chosen {:?}; |G| {}, |X_S| {}, dense {}, total {} points; error {:.4}, pass {}",
            r.guesses.len(),
            r.chosen,
            r.isolated_size,
            r.sparse_size,
            r.dense_coreset_size,
            out.coreset.size(),
            check.max_rel_error,
            check.pass
        );
    }
    Ok(())
}
