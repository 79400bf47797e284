//! Separated duplication of a metric space: copies far apart, distances inside
//! a copy unchanged, and the l_p embedding into one more dimension.

use robust_coreset::duplication::{duplicate, embed, separation_for};
use robust_coreset::{MetricSpace, Point};

fn main() -> robust_coreset::Result<()> {
    let base = MetricSpace::euclidean(2);
    let w = separation_for(10.0, 100, 2, 0.2);
    let dup = duplicate(&base, 3, w)?;
    let a = Point::dup(Point::coords(vec![1.0, 2.0]), 1);
    let b = Point::dup(Point::coords(vec![4.0, 6.0]), 1);
    let c = Point::dup(Point::coords(vec![4.0, 6.0]), 3);
    println!("separation w = {w}");
    println!("same copy: {} (base distance 5)", dup.distance(&a, &b)?);
    println!("other copy: {} (>= w)", dup.distance(&a, &c)?);
    println!("embedding of the far point: {:?}", embed(&dup, &c)?);

    let finite = MetricSpace::finite(2, vec![0.0, 1.0, 1.0, 0.0])?;
    let fd = duplicate(&finite, 2, 50.0)?;
    let p = Point::dup(Point::Index(0), 1);
    let q = Point::dup(Point::Index(1), 2);
    println!("finite metric, additive mode: {}", fd.distance(&p, &q)?);
    Ok(())
}
