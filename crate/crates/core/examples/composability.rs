//! Coresets of disjoint pieces union to a coreset of the whole.

use robust_coreset::bench::{gen_dataset, DatasetSpec};
use robust_coreset::objective::{check_coreset, default_pool, CheckSpec};
use robust_coreset::vanilla::{SensitivityBuilder, VanillaBuilder};
use robust_coreset::{MetricSpace, WeightedPointSet};

fn main() -> robust_coreset::Result<()> {
    let x = gen_dataset(&DatasetSpec { n: 60, seed: 8, ..Default::default() }, 2, 2)?;
    let metric = MetricSpace::euclidean(2);
    let (k, z, m, eps) = (2, 1, 2.0, 0.3);
    let half = x.len() / 2;
    let a = x.select((0..half).map(|i| (i, x.weight(i))));
    let b = x.select((half..x.len()).map(|i| (i, x.weight(i))));
    let builder = SensitivityBuilder::with_samples(20);
    let pool = default_pool(&metric, &x, 4);
    let spec = CheckSpec::new(k, z, m, eps).exhaustive();
    let mut eta = 0.0;
    let mut union = WeightedPointSet::new();
    for part in [&a, &b] {
        let s = builder.build(&metric, part, k, z, eps, 3)?.weighted;
        let r = check_coreset(&metric, part, &s, &spec, &pool)?;
        eta += r.eta_required;
        union = union.union(&s);
    }
    let whole = check_coreset(&metric, &x, &union, &spec.clone().with_eta(eta), &pool)?;
    println!("pieces need eta {eta:.3}; union passes at (eps, eta1 + eta2): {}", whole.pass);
    Ok(())
}
