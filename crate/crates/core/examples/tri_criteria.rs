//! Tri-criteria approximation: more centers, more outliers, bounded cost blow-up.

use robust_coreset::approx::tri_criteria;
use robust_coreset::bench::{gen_dataset, DatasetSpec};
use robust_coreset::objective::{brute_force_opt, robust_cost};
use robust_coreset::MetricSpace;

fn main() -> robust_coreset::Result<()> {
    let spec = DatasetSpec { n: 40, seed: 5, ..Default::default() };
    let (k, z, m) = (2, 2, 3.0);
    let x = gen_dataset(&spec, k, m as usize)?;
    let metric = MetricSpace::euclidean(2);
    let (opt, _) = brute_force_opt(&metric, &x, k, z, m, x.points(), 1 << 22)?;
    for seed in 0..5 {
        let sol = tri_criteria(&metric, &x, k, z, m, seed)?;
        let c = robust_cost(&metric, &x, &sol.centers, z, sol.gamma as f64 * m)?.value;
        println!(
            "seed {seed}: {} centers, {} outliers removed, cost {c:.2}, alpha = {:.3}",
            sol.centers.len(),
            sol.gamma as f64 * m,
            c / opt
        );
    }
    Ok(())
}
