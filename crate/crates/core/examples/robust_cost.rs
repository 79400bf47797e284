//! Robust clustering cost and the exact reference optimum on a tiny instance.

use robust_coreset::objective::{brute_force_opt, cost, robust_cost};
use robust_coreset::{CenterSet, MetricSpace, Point, WeightedPointSet};

fn main() -> robust_coreset::Result<()> {
    let metric = MetricSpace::euclidean(1);
    let x = WeightedPointSet::from_weighted([
        (Point::coords(vec![0.0]), 2.0),
        (Point::coords(vec![1.0]), 1.0),
        (Point::coords(vec![10.0]), 1.0),
        (Point::coords(vec![100.0]), 0.5),
    ])?;
    let c = CenterSet::new(vec![Point::coords(vec![0.5])]);
    println!("cost_1(X, C)          = {}", cost(&metric, &x, &c, 1)?);
    for h in [0.0, 0.25, 0.5, 1.5] {
        let r = robust_cost(&metric, &x, &c, 1, h)?;
        println!("cost_1^({h:>4})(X, C)   = {:>8.3}  outlier weight {}", r.value, r.outliers.total_weight());
    }
    let (opt, centers) = brute_force_opt(&metric, &x, 2, 2, 1.0, x.points(), 1 << 20)?;
    println!("OPT_2^(1) with k=2     = {opt:.3} at {:?}", centers.points());
    Ok(())
}
