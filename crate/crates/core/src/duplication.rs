//! Separated duplications: `h` copies of a metric space that are isometric
//! within a copy and at least `max{w, dist(x, y)}` apart across copies.

use crate::error::{Error, Result};
use crate::metric::{DupMode, MetricSpace, Point};

fn check(h: usize, w: f64) -> Result<()> {
    if h == 0 {
        return Err(Error::Parameter("duplication needs h >= 1".into()));
    }
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::Parameter(format!("separation w = {w} must be finite and nonnegative")));
    }
    Ok(())
}

/// `h` copies of an `l_p` space, measured as the embedding `(x, i) -> (x, i w)` in `R^(d+1)`.
pub fn duplicate_lp(base: &MetricSpace, h: usize, w: f64) -> Result<MetricSpace> {
    check(h, w)?;
    match base {
        MetricSpace::EuclideanLp { .. } => Ok(MetricSpace::Duplicated {
            base: Box::new(base.clone()),
            h,
            w,
            mode: DupMode::EmbedLp,
        }),
        _ => Err(Error::InvalidMetric("l_p duplication needs an l_p base space".into())),
    }
}

/// `h` copies of any space with `dist'((x,i),(y,j)) = dist(x,y) + |i-j| w`.
pub fn duplicate_additive(base: &MetricSpace, h: usize, w: f64) -> Result<MetricSpace> {
    check(h, w)?;
    Ok(MetricSpace::Duplicated {
        base: Box::new(base.clone()),
        h,
        w,
        mode: DupMode::Additive,
    })
}

/// The natural duplication of `base`: embedding for `l_p`, additive otherwise.
pub fn duplicate(base: &MetricSpace, h: usize, w: f64) -> Result<MetricSpace> {
    match base {
        MetricSpace::EuclideanLp { .. } => duplicate_lp(base, h, w),
        _ => duplicate_additive(base, h, w),
    }
}

/// Image of a duplicated `l_p` point in `R^(d+1)`: `(x, i) -> (x, i w)`.
pub fn embed(space: &MetricSpace, p: &Point) -> Result<Point> {
    space.validate(p)?;
    match (space, p) {
        (MetricSpace::Duplicated { w, mode: DupMode::EmbedLp, .. }, Point::Dup { base, copy }) => {
            let mut c = base.as_coords().ok_or_else(|| Error::InvalidPoint("embedding needs coordinates".into()))?.to_vec();
            c.push(*copy as f64 * w);
            Ok(Point::Coords(c))
        }
        _ => Err(Error::InvalidMetric("embedding is defined for l_p duplications only".into())),
    }
}

/// Number of elements of a duplicated finite metric (`|V| h`).
pub fn ambient_size(space: &MetricSpace) -> Option<usize> {
    match space {
        MetricSpace::Finite(f) => Some(f.size()),
        MetricSpace::Duplicated { base, h, .. } => ambient_size(base).map(|n| n * h),
        MetricSpace::EuclideanLp { .. } => None,
    }
}

/// Copy separation used by the size-preserving construction:
/// `200 z eps^-1 diam(X) n^(1/z)`.
pub fn separation_for(diam: f64, n: usize, z: u32, eps: f64) -> f64 {
    200.0 * z as f64 / eps * diam * (n as f64).powf(1.0 / z as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::lp_norm;

    #[test]
    fn separation_examples() {
        assert_eq!(separation_for(1.0, 8, 1, 0.5), 3200.0);
        assert_eq!(separation_for(1.0, 16, 2, 1.0), 1600.0);
        assert_eq!(separation_for(0.0, 5, 1, 0.3), 0.0);
    }

    #[test]
    fn embed_matches_distance() {
        let base = MetricSpace::lp(2, 3.0).unwrap();
        let dup = duplicate_lp(&base, 4, 2.5).unwrap();
        let a = Point::dup(Point::coords(vec![0.5, 1.0]), 1);
        let b = Point::dup(Point::coords(vec![-1.0, 2.0]), 4);
        let (ea, eb) = (embed(&dup, &a).unwrap(), embed(&dup, &b).unwrap());
        let direct = lp_norm(ea.as_coords().unwrap(), eb.as_coords().unwrap(), 3.0);
        assert!((dup.dist(&a, &b) - direct).abs() < 1e-9);
    }

    #[test]
    fn same_point_other_copy_is_w_away() {
        let dup = duplicate_lp(&MetricSpace::euclidean(2), 3, 7.0).unwrap();
        let x = Point::coords(vec![1.0, 1.0]);
        assert!((dup.dist(&Point::dup(x.clone(), 1), &Point::dup(x, 2)) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn additive_example() {
        let base = MetricSpace::finite(2, vec![0.0, 3.0, 3.0, 0.0]).unwrap();
        let dup = duplicate_additive(&base, 3, 10.0).unwrap();
        let d = dup.distance(&Point::dup(Point::Index(0), 1), &Point::dup(Point::Index(1), 3)).unwrap();
        assert_eq!(d, 23.0);
        assert_eq!(ambient_size(&dup), Some(6));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(duplicate_lp(&MetricSpace::euclidean(1), 0, 1.0).is_err());
        assert!(duplicate_additive(&MetricSpace::euclidean(1), 1, -1.0).is_err());
        let f = MetricSpace::finite(1, vec![0.0]).unwrap();
        assert!(duplicate_lp(&f, 2, 1.0).is_err());
    }
}
