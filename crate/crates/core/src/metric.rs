//! Metric spaces, points and weighted point sets.
//!
//! Every distance in the crate is computed through [`MetricSpace::dist`] or
//! [`MetricSpace::distance`]. Three kinds of space are supported:
//!
//! - Euclidean `(R^d, l_p)` with `p >= 1`,
//! - a finite metric given by an explicit `n x n` distance matrix,
//! - a separated duplication of another space (see [`crate::duplication`]).

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Absolute tolerance used for every floating point comparison in the crate.
pub const TOL: f64 = 1e-9;

/// A point of a [`MetricSpace`].
///
/// Equality and hashing are bitwise on coordinates (with `-0.0 == 0.0`), which
/// is what weighted sets use to merge duplicate insertions.
#[derive(Debug, Clone)]
pub enum Point {
    /// Coordinates in Euclidean mode.
    Coords(Vec<f64>),
    /// Element index in finite-metric mode.
    Index(usize),
    /// A base point together with its copy index in `1..=h`.
    Dup { base: Box<Point>, copy: usize },
}

impl Point {
    pub fn coords(c: impl Into<Vec<f64>>) -> Self {
        Point::Coords(c.into())
    }

    pub fn dup(base: Point, copy: usize) -> Self {
        Point::Dup {
            base: Box::new(base),
            copy,
        }
    }

    pub fn as_coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            _ => None,
        }
    }

    /// Strips any number of duplication layers.
    pub fn base(&self) -> &Point {
        match self {
            Point::Dup { base, .. } => base.base(),
            p => p,
        }
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Coords(a), Point::Coords(b)) => {
                a.len() == b.len()
                    && a
                        .iter()
                        .zip(b)
                        .all(|(x, y)| canonical_bits(*x) == canonical_bits(*y))
            }
            (Point::Index(a), Point::Index(b)) => a == b,
            (Point::Dup { base: a, copy: i }, Point::Dup { base: b, copy: j }) => i == j && a == b,
            _ => false,
        }
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Point::Coords(c) => {
                0u8.hash(state);
                c.len().hash(state);
                for x in c {
                    canonical_bits(*x).hash(state);
                }
            }
            Point::Index(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            Point::Dup { base, copy } => {
                2u8.hash(state);
                copy.hash(state);
                base.hash(state);
            }
        }
    }
}

/// How a duplicated space measures distance across copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DupMode {
    /// `(||x-y||_p^p + (|i-j| w)^p)^(1/p)`; the base space must be `l_p`.
    EmbedLp,
    /// `dist(x, y) + |i-j| w`; works over any base space.
    Additive,
}

/// Finite metric given by a dense row-major distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetric {
    /// Validates and wraps a row-major `n x n` matrix.
    ///
    /// The triangle inequality is checked on every triple when `n <= 512`,
    /// otherwise on a fixed pseudo-random sample of triples.
    pub fn new(n: usize, dist: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMetric("finite metric with n = 0".into()));
        }
        if dist.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = dist[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative length"
                    )));
                }
                if i == j && v.abs() > TOL {
                    return Err(Error::InvalidMetric(format!("dist({i},{i}) = {v} != 0")));
                }
                if (v - dist[j * n + i]).abs() > TOL {
                    return Err(Error::InvalidMetric(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        let m = FiniteMetric { n, dist };
        let violates = |i: usize, j: usize, l: usize| m.get(i, j) > m.get(i, l) + m.get(l, j) + TOL;
        if n <= 512 {
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        if violates(i, j, l) {
                            return Err(Error::InvalidMetric(format!(
                                "triangle inequality fails on ({i},{j}) via {l}"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7419_1a5e);
            for _ in 0..200_000 {
                let (i, j, l) = (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                );
                if violates(i, j, l) {
                    return Err(Error::InvalidMetric(format!(
                        "triangle inequality fails on ({i},{j}) via {l}"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

/// The underlying metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace {
    EuclideanLp { d: usize, p: f64 },
    Finite(FiniteMetric),
    Duplicated {
        base: Box<MetricSpace>,
        h: usize,
        w: f64,
        mode: DupMode,
    },
}

impl MetricSpace {
    /// `(R^d, l_2)`.
    pub fn euclidean(d: usize) -> Self {
        MetricSpace::EuclideanLp { d, p: 2.0 }
    }

    pub fn lp(d: usize, p: f64) -> Result<Self> {
        if d == 0 || !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidMetric(format!("l_p space needs d >= 1 and finite p >= 1, got d={d}, p={p}")));
        }
        Ok(MetricSpace::EuclideanLp { d, p })
    }

    pub fn finite(n: usize, dist: Vec<f64>) -> Result<Self> {
        Ok(MetricSpace::Finite(FiniteMetric::new(n, dist)?))
    }

    /// Euclidean dimension, if this is (or duplicates) an `l_p` space.
    pub fn dim(&self) -> Option<usize> {
        match self {
            MetricSpace::EuclideanLp { d, .. } => Some(*d),
            MetricSpace::Duplicated { base, .. } => base.dim(),
            MetricSpace::Finite(_) => None,
        }
    }

    /// Checks that `x` is a valid element of this space.
    pub fn validate(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (MetricSpace::EuclideanLp { d, .. }, Point::Coords(c)) => {
                if c.len() != *d {
                    return Err(Error::InvalidPoint(format!(
                        "expected {d} coordinates, got {}",
                        c.len()
                    )));
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPoint("non-finite coordinate".into()));
                }
                Ok(())
            }
            (MetricSpace::Finite(f), Point::Index(i)) => {
                if *i >= f.n {
                    return Err(Error::InvalidPoint(format!(
                        "index {i} outside ambient size {}",
                        f.n
                    )));
                }
                Ok(())
            }
            (MetricSpace::Duplicated { base, h, .. }, Point::Dup { base: p, copy }) => {
                if *copy == 0 || copy > h {
                    return Err(Error::InvalidPoint(format!("copy {copy} outside 1..={h}")));
                }
                base.validate(p)
            }
            _ => Err(Error::InvalidPoint(format!(
                "point {x:?} does not belong to this kind of metric space"
            ))),
        }
    }

    /// Checked distance.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.dist(x, y))
    }

    /// Distance between points already known to be valid for this space.
    ///
    /// Panics on a point of the wrong kind.
    pub fn dist(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (MetricSpace::EuclideanLp { p, .. }, Point::Coords(a), Point::Coords(b)) => {
                lp_norm(a, b, *p)
            }
            (MetricSpace::Finite(f), Point::Index(i), Point::Index(j)) => f.get(*i, *j),
            (
                MetricSpace::Duplicated { base, w, mode, .. },
                Point::Dup { base: a, copy: i },
                Point::Dup { base: b, copy: j },
            ) => {
                let gap = i.abs_diff(*j) as f64 * w;
                match mode {
                    DupMode::Additive => base.dist(a, b) + gap,
                    DupMode::EmbedLp => {
                        let p = match base.as_ref() {
                            MetricSpace::EuclideanLp { p, .. } => *p,
                            _ => unreachable!("embed-lp duplication over a non-l_p base"),
                        };
                        let inner = base.dist(a, b);
                        if gap == 0.0 {
                            inner
                        } else if p == 2.0 {
                            inner.hypot(gap)
                        } else {
                            (inner.powf(p) + gap.powf(p)).powf(1.0 / p)
                        }
                    }
                }
            }
            _ => panic!("points {x:?} and {y:?} do not belong to this metric space"),
        }
    }
}

#[inline]
pub(crate) fn lp_norm(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    } else if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// A finite set of points with nonnegative weights.
///
/// Points are deduplicated by exact equality; inserting an existing point adds
/// to its weight.
#[derive(Debug, Clone, Default)]
pub struct WeightedPointSet {
    points: Vec<Point>,
    weights: Vec<f64>,
    total: f64,
    index: HashMap<Point, usize>,
}

impl PartialEq for WeightedPointSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.weights == other.weights
    }
}

impl WeightedPointSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unit-weight set; repeated points accumulate weight.
    pub fn unit(points: impl IntoIterator<Item = Point>) -> Self {
        let mut s = Self::new();
        for p in points {
            s.insert(p, 1.0);
        }
        s
    }

    pub fn from_weighted(items: impl IntoIterator<Item = (Point, f64)>) -> Result<Self> {
        let mut s = Self::new();
        for (p, w) in items {
            s.push(p, w)?;
        }
        Ok(s)
    }

    /// Adds `w` to the weight of `p`. Zero weights are ignored.
    pub fn push(&mut self, p: Point, w: f64) -> Result<()> {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Parameter(format!("weight {w} is not finite and nonnegative")));
        }
        self.insert(p, w);
        Ok(())
    }

    pub(crate) fn insert(&mut self, p: Point, w: f64) {
        if w == 0.0 {
            return;
        }
        match self.index.get(&p) {
            Some(&i) => self.weights[i] += w,
            None => {
                self.index.insert(p.clone(), self.points.len());
                self.points.push(p);
                self.weights.push(w);
            }
        }
        self.total += w;
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Weight of `p`, zero when absent.
    pub fn weight_of(&self, p: &Point) -> f64 {
        self.index_of(p).map_or(0.0, |i| self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    /// Builds the weighted set restricted to the given `(index, weight)` pairs.
    pub fn select(&self, members: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut s = Self::new();
        for (i, w) in members {
            s.insert(self.points[i].clone(), w);
        }
        s
    }

    /// Union: weights add pointwise.
    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (p, w) in other.iter() {
            s.insert(p.clone(), w);
        }
        s
    }

    /// Pointwise weight difference `self - other`; points whose weight drops to
    /// zero (within [`TOL`]) leave the support.
    pub fn subtract(&self, other: &Self) -> Result<Self> {
        for (p, w) in other.iter() {
            let have = self.weight_of(p);
            if w > have + TOL {
                return Err(Error::NotASubset(format!(
                    "point {p:?} has weight {w} but only {have} is available"
                )));
            }
        }
        let mut s = Self::new();
        for (p, w) in self.iter() {
            let rest = w - other.weight_of(p);
            if rest > TOL {
                s.insert(p.clone(), rest);
            }
        }
        Ok(s)
    }

    /// `(self, w_self) ⊆ (other, w_other)`: support containment and pointwise weights.
    pub fn is_weighted_subset_of(&self, other: &Self) -> bool {
        self.iter().all(|(p, w)| w <= other.weight_of(p) + TOL)
    }

    /// Support containment only.
    pub fn support_subset_of(&self, other: &Self) -> bool {
        self.points.iter().all(|p| other.index_of(p).is_some())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for w in &mut s.weights {
            *w *= factor;
        }
        s.total *= factor;
        s
    }

    pub fn validate_for(&self, metric: &MetricSpace) -> Result<()> {
        self.points.iter().try_for_each(|p| metric.validate(p))
    }
}

/// Exact diameter by a quadratic scan.
pub fn diameter(metric: &MetricSpace, x: &WeightedPointSet) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate_for(metric)?;
    Ok(diameter_of(metric, x.points()))
}

pub(crate) fn diameter_of<'a>(metric: &MetricSpace, pts: impl IntoIterator<Item = &'a Point> + Clone) -> f64 {
    let v: Vec<&Point> = pts.into_iter().collect();
    let mut best = 0.0f64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max(metric.dist(v[i], v[j]));
        }
    }
    best
}
