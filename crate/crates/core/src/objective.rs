//! Clustering objectives, robust (outlier-discarding) costs, brute-force optima
//! and the exhaustive coreset checker.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, WeightedPointSet, TOL};

/// Default enumeration budget (number of center subsets) for brute force and checks.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// A set of candidate centers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CenterSet {
    centers: Vec<Point>,
}

impl CenterSet {
    pub fn new(centers: Vec<Point>) -> Self {
        CenterSet { centers }
    }

    pub fn points(&self) -> &[Point] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.centers
    }

    /// `dist(x, C)`; infinite for an empty set.
    pub fn dist(&self, metric: &MetricSpace, x: &Point) -> f64 {
        self.centers
            .iter()
            .map(|c| metric.dist(x, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the nearest center (lowest index on ties).
    pub fn nearest(&self, metric: &MetricSpace, x: &Point) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.centers.iter().enumerate() {
            let d = metric.dist(x, c);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }

    pub fn validate_for(&self, metric: &MetricSpace) -> Result<()> {
        self.centers.iter().try_for_each(|c| metric.validate(c))
    }
}

impl FromIterator<Point> for CenterSet {
    fn from_iter<T: IntoIterator<Item = Point>>(iter: T) -> Self {
        CenterSet::new(iter.into_iter().collect())
    }
}

fn check_z(z: u32) -> Result<()> {
    if z == 0 {
        return Err(Error::Parameter("z must be at least 1".into()));
    }
    Ok(())
}

fn prepare(metric: &MetricSpace, x: &WeightedPointSet, c: &CenterSet, z: u32) -> Result<()> {
    check_z(z)?;
    if c.is_empty() {
        return Err(Error::EmptyCenters);
    }
    c.validate_for(metric)?;
    x.validate_for(metric)
}

/// `cost_z(X, C) = sum_x w(x) dist(x, C)^z`.
pub fn cost(metric: &MetricSpace, x: &WeightedPointSet, c: &CenterSet, z: u32) -> Result<f64> {
    prepare(metric, x, c, z)?;
    Ok(x.iter()
        .map(|(p, w)| w * c.dist(metric, p).powi(z as i32))
        .sum())
}

/// Result of [`robust_cost`].
#[derive(Debug, Clone, PartialEq)]
pub struct RobustCost {
    pub value: f64,
    /// The removed weight; `w(outliers) = h`.
    pub outliers: WeightedPointSet,
}

/// Per-point distances `dist(x, C)` of `x`'s support, in support order.
pub fn distances(metric: &MetricSpace, x: &WeightedPointSet, c: &CenterSet) -> Vec<f64> {
    x.points().iter().map(|p| c.dist(metric, p)).collect()
}

/// Support indices ordered by distance descending, ties by ascending index.
pub(crate) fn farthest_first(dist: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
    order
}

/// Greedy removal of weight `h` from the farthest points: returns per-support
/// removed amounts. `h` must not exceed the total weight (up to [`TOL`]).
pub(crate) fn greedy_removal(dist: &[f64], weights: &[f64], h: f64) -> Vec<f64> {
    let mut removed = vec![0.0; dist.len()];
    let mut left = h;
    for i in farthest_first(dist) {
        if left <= 0.0 {
            break;
        }
        let r = weights[i].min(left);
        removed[i] = r;
        left -= r;
    }
    removed
}

/// `cost_z^(h)(X, C)`: the cost after discarding weight `h` from the points
/// farthest from `C`, splitting the boundary point fractionally.
pub fn robust_cost(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    c: &CenterSet,
    z: u32,
    h: f64,
) -> Result<RobustCost> {
    prepare(metric, x, c, z)?;
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::Parameter(format!("outlier budget h = {h} must be finite and nonnegative")));
    }
    let total = x.total_weight();
    if h > total + TOL {
        return Err(Error::Infeasible { h, total });
    }
    let h = h.min(total);
    let dist = distances(metric, x, c);
    let removed = greedy_removal(&dist, x.weights(), h);
    let mut value = 0.0;
    let mut outliers = WeightedPointSet::new();
    for (i, (p, w)) in x.iter().enumerate() {
        let keep = w - removed[i];
        if keep > 0.0 {
            value += keep * dist[i].powi(z as i32);
        }
        outliers.insert(p.clone(), removed[i]);
    }
    Ok(RobustCost { value, outliers })
}

/// The two generalized triangle inequality bounds on `(a+b)^z`:
/// `(1+eps)^(z-1) a^z + (1+1/eps)^(z-1) b^z` and `(1+eps) a^z + (3z/eps)^(z-1) b^z`.
pub fn triangle_bounds(a: f64, b: f64, z: u32, eps: f64) -> (f64, f64) {
    let zi = z as i32;
    let zm = zi - 1;
    let b1 = (1.0 + eps).powi(zm) * a.powi(zi) + (1.0 + 1.0 / eps).powi(zm) * b.powi(zi);
    let b2 = if z == 1 {
        a + b
    } else {
        (1.0 + eps) * a.powi(zi) + (3.0 * z as f64 / eps).powi(zm) * b.powi(zi)
    };
    (b1, b2)
}

/// `n choose k` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Candidate-center enumerator over a fixed pool with a precomputed table of
/// `dist^z` from every pool point to every support point of a reference set.
struct SubsetEnumerator {
    pool_len: usize,
    k: usize,
    n: usize,
    table: Vec<f64>,
}

impl SubsetEnumerator {
    fn new(metric: &MetricSpace, pool: &[Point], support: &[Point], k: usize, z: u32, budget: u128) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::EmptyCenters);
        }
        let k = k.min(pool.len());
        let required = binomial(pool.len(), k);
        if required > budget {
            return Err(Error::Budget { required, budget });
        }
        let n = support.len();
        let mut table = Vec::with_capacity(pool.len() * n);
        for c in pool {
            for p in support {
                table.push(metric.dist(p, c).powi(z as i32));
            }
        }
        Ok(SubsetEnumerator {
            pool_len: pool.len(),
            k,
            n,
            table,
        })
    }

    /// Calls `visit(subset, dz)` for every k-subset in lexicographic order,
    /// where `dz[i] = dist(support_i, subset)^z`.
    fn for_each(&self, mut visit: impl FnMut(&[usize], &[f64])) {
        let mut levels = vec![vec![f64::INFINITY; self.n]; self.k + 1];
        let mut idx = vec![0usize; self.k];
        self.recurse(0, 0, &mut levels, &mut idx, &mut visit);
    }

    fn recurse(
        &self,
        depth: usize,
        start: usize,
        levels: &mut [Vec<f64>],
        idx: &mut [usize],
        visit: &mut impl FnMut(&[usize], &[f64]),
    ) {
        if depth == self.k {
            visit(idx, &levels[depth]);
            return;
        }
        let last = self.pool_len - (self.k - depth);
        for c in start..=last {
            idx[depth] = c;
            let (lo, hi) = levels.split_at_mut(depth + 1);
            let row = &self.table[c * self.n..(c + 1) * self.n];
            for ((out, prev), t) in hi[0].iter_mut().zip(&lo[depth]).zip(row) {
                *out = prev.min(*t);
            }
            self.recurse(depth + 1, c + 1, levels, idx, visit);
        }
    }
}

/// The farthest points of a weighted set (by `dist^z`) covering a weight of at
/// least `hmax`, plus the exact cost of everything else. Lets the robust cost be
/// evaluated for every `h <= hmax` without sorting the whole set.
struct TopProfile {
    /// (dz, weight), sorted by dz descending then by scan order.
    top: Vec<(f64, f64)>,
    top_weight: f64,
    rest: f64,
}

impl TopProfile {
    fn build(hmax: f64, items: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut prof = TopProfile {
            top: Vec::new(),
            top_weight: 0.0,
            rest: 0.0,
        };
        for (dz, w) in items {
            if w <= 0.0 {
                continue;
            }
            if let Some(&(last_dz, _)) = prof.top.last() {
                if prof.top_weight >= hmax && dz <= last_dz {
                    prof.rest += w * dz;
                    continue;
                }
            }
            let pos = prof.top.partition_point(|&(d, _)| d >= dz);
            prof.top.insert(pos, (dz, w));
            prof.top_weight += w;
            while prof.top.len() > 1 {
                let (ld, lw) = *prof.top.last().unwrap();
                if prof.top_weight - lw >= hmax {
                    prof.top.pop();
                    prof.top_weight -= lw;
                    prof.rest += lw * ld;
                } else {
                    break;
                }
            }
        }
        prof
    }

    /// Robust cost with `h` removed; `h` beyond the total weight removes everything.
    fn value(&self, h: f64) -> f64 {
        let mut left = h;
        let mut v = self.rest;
        for &(dz, w) in &self.top {
            let r = w.min(left.max(0.0));
            left -= r;
            v += (w - r) * dz;
        }
        v
    }

    /// Cumulative weights at which the greedy removal moves to the next point.
    fn breakpoints(&self, hmax: f64, out: &mut Vec<f64>) {
        let mut acc = 0.0;
        for &(_, w) in &self.top {
            acc += w;
            if acc < hmax {
                out.push(acc);
            }
        }
    }
}

/// Exact `OPT_z^(m)(X)` over all k-subsets of a candidate pool.
///
/// With the pool equal to the data this is a desk-scale reference optimum
/// rather than the optimum over the whole space.
pub fn brute_force_opt(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    k: usize,
    z: u32,
    m: f64,
    pool: &[Point],
    budget: u128,
) -> Result<(f64, CenterSet)> {
    check_z(z)?;
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate_for(metric)?;
    pool.iter().try_for_each(|p| metric.validate(p))?;
    if m > x.total_weight() + TOL {
        return Err(Error::Infeasible { h: m, total: x.total_weight() });
    }
    let en = SubsetEnumerator::new(metric, pool, x.points(), k, z, budget)?;
    let mut best = f64::INFINITY;
    let mut best_idx = Vec::new();
    en.for_each(|idx, dz| {
        let prof = TopProfile::build(m, dz.iter().copied().zip(x.weights().iter().copied()));
        let v = prof.value(m);
        if v < best {
            best = v;
            best_idx = idx.to_vec();
        }
    });
    let centers = best_idx.iter().map(|&i| pool[i].clone()).collect();
    Ok((best, centers))
}

/// Which outlier budgets `h` a coreset check covers.
#[derive(Debug, Clone, PartialEq)]
pub enum HGrid {
    /// A fixed list of budgets.
    Values(Vec<f64>),
    /// Every real `h` in `[0, m]`. Exact: both robust costs are piecewise linear
    /// in `h`, so the worst case sits at a breakpoint of either set or at `0`/`m`.
    Exhaustive,
}

/// `{0, 1, ..., floor(m)} ∪ {m/2, m}`, sorted and deduplicated.
pub fn default_h_grid(m: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=m.floor() as usize).map(|i| i as f64).collect();
    v.push(m / 2.0);
    v.push(m);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Parameters of a coreset check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub k: usize,
    pub z: u32,
    pub m: f64,
    pub eps: f64,
    pub eta: f64,
    pub h: HGrid,
    pub budget: u128,
}

impl CheckSpec {
    pub fn new(k: usize, z: u32, m: f64, eps: f64) -> Self {
        CheckSpec {
            k,
            z,
            m,
            eps,
            eta: 0.0,
            h: HGrid::Values(default_h_grid(m)),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn exhaustive(mut self) -> Self {
        self.h = HGrid::Exhaustive;
        self
    }

    pub fn with_h_grid(mut self, grid: Vec<f64>) -> Self {
        self.h = HGrid::Values(grid);
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// Outcome of [`check_coreset`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoresetCheckReport {
    /// `max (|cost_S - cost_X| - eta) / cost_X` over all checked `(C, h)`, clipped at 0.
    pub max_rel_error: f64,
    pub worst_centers: CenterSet,
    pub worst_h: f64,
    pub eps: f64,
    pub eta: f64,
    /// Smallest additive budget that would make the check pass at `eps`.
    pub eta_required: f64,
    pub pass: bool,
    pub subsets_checked: u64,
    pub pool_size: usize,
    pub h_mode: String,
}

fn fmt_point(p: &Point) -> String {
    match p {
        Point::Coords(c) => c.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","),
        Point::Index(i) => format!("#{i}"),
        Point::Dup { base, copy } => format!("{}@{copy}", fmt_point(base)),
    }
}

fn parse_point(s: &str) -> Option<Point> {
    if let Some((b, c)) = s.rsplit_once('@') {
        return Some(Point::dup(parse_point(b)?, c.parse().ok()?));
    }
    if let Some(i) = s.strip_prefix('#') {
        return i.parse().ok().map(Point::Index);
    }
    s.split(',')
        .map(|v| v.parse::<f64>().ok())
        .collect::<Option<Vec<_>>>()
        .map(Point::Coords)
}

impl CoresetCheckReport {
    /// `key=value` lines, one field per line, in a fixed order.
    pub fn to_record(&self) -> String {
        let centers = self
            .worst_centers
            .points()
            .iter()
            .map(fmt_point)
            .collect::<Vec<_>>()
            .join(";");
        let mut s = String::new();
        let _ = writeln!(s, "pass={}", self.pass);
        let _ = writeln!(s, "max_rel_error={}", self.max_rel_error);
        let _ = writeln!(s, "eps={}", self.eps);
        let _ = writeln!(s, "eta={}", self.eta);
        let _ = writeln!(s, "eta_required={}", self.eta_required);
        let _ = writeln!(s, "worst_h={}", self.worst_h);
        let _ = writeln!(s, "worst_centers={centers}");
        let _ = writeln!(s, "subsets_checked={}", self.subsets_checked);
        let _ = writeln!(s, "pool_size={}", self.pool_size);
        let _ = writeln!(s, "h_mode={}", self.h_mode);
        s
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let mut r = CoresetCheckReport {
            max_rel_error: 0.0,
            worst_centers: CenterSet::default(),
            worst_h: 0.0,
            eps: 0.0,
            eta: 0.0,
            eta_required: 0.0,
            pass: false,
            subsets_checked: 0,
            pool_size: 0,
            h_mode: String::new(),
        };
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
            let (key, val) = line.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let num = || val.parse::<f64>().map_err(|_| err("bad number"));
            match key {
                "pass" => r.pass = val.parse().map_err(|_| err("bad bool"))?,
                "max_rel_error" => r.max_rel_error = num()?,
                "eps" => r.eps = num()?,
                "eta" => r.eta = num()?,
                "eta_required" => r.eta_required = num()?,
                "worst_h" => r.worst_h = num()?,
                "worst_centers" => {
                    r.worst_centers = if val.is_empty() {
                        CenterSet::default()
                    } else {
                        val.split(';')
                            .map(|p| parse_point(p).ok_or_else(|| err("bad point")))
                            .collect::<Result<Vec<_>>>()?
                            .into_iter()
                            .collect()
                    }
                }
                "subsets_checked" => r.subsets_checked = val.parse().map_err(|_| err("bad count"))?,
                "pool_size" => r.pool_size = val.parse().map_err(|_| err("bad count"))?,
                "h_mode" => r.h_mode = val.to_string(),
                _ => return Err(err("unknown key")),
            }
        }
        Ok(r)
    }
}

/// Relative error of one `(C, h)` comparison after absorbing `eta`.
fn rel_error(cs: f64, cx: f64, eta: f64) -> f64 {
    let excess = (cs - cx).abs() - eta;
    if excess <= TOL * cx.abs().max(1.0) {
        0.0
    } else if cx <= TOL {
        f64::INFINITY
    } else {
        excess / cx
    }
}

/// Checks `S` against `X` over every k-subset of `pool` and every budget of the
/// configured h-grid: passes iff `|cost^(h)(S,C) - cost^(h)(X,C)| <= eps cost^(h)(X,C) + eta`
/// everywhere. Budgets larger than a set's total weight remove the whole set.
///
/// Errors only if `S` has a point outside the support of `X`; weights are free,
/// so a badly weighted `S` produces a failing report instead.
pub fn check_coreset(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    s: &WeightedPointSet,
    spec: &CheckSpec,
    pool: &[Point],
) -> Result<CoresetCheckReport> {
    check_z(spec.z)?;
    if spec.k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate_for(metric)?;
    pool.iter().try_for_each(|p| metric.validate(p))?;
    let s_map: Vec<usize> = s
        .points()
        .iter()
        .map(|p| {
            x.index_of(p)
                .ok_or_else(|| Error::NotASubset(format!("coreset point {p:?} is not in the dataset")))
        })
        .collect::<Result<_>>()?;
    let grid: Vec<f64> = match &spec.h {
        HGrid::Values(v) => {
            if v.iter().any(|h| !(*h >= 0.0) || *h > spec.m + TOL) {
                return Err(Error::Parameter("h grid must lie within [0, m]".into()));
            }
            v.clone()
        }
        HGrid::Exhaustive => Vec::new(),
    };
    let hmax = match &spec.h {
        HGrid::Values(v) => v.iter().copied().fold(0.0, f64::max),
        HGrid::Exhaustive => spec.m,
    };
    let en = SubsetEnumerator::new(metric, pool, x.points(), spec.k, spec.z, spec.budget)?;
    let xw = x.weights();
    let sw = s.weights();

    let mut worst = (-1.0f64, Vec::new(), 0.0f64);
    let mut eta_required = 0.0f64;
    let mut checked = 0u64;
    let mut hs = Vec::new();
    en.for_each(|idx, dz| {
        checked += 1;
        let px = TopProfile::build(hmax, dz.iter().copied().zip(xw.iter().copied()));
        let ps = TopProfile::build(hmax, s_map.iter().map(|&i| dz[i]).zip(sw.iter().copied()));
        let hs: &[f64] = match &spec.h {
            HGrid::Values(_) => &grid,
            HGrid::Exhaustive => {
                hs.clear();
                hs.push(0.0);
                hs.push(spec.m);
                px.breakpoints(spec.m, &mut hs);
                ps.breakpoints(spec.m, &mut hs);
                hs.sort_by(f64::total_cmp);
                hs.dedup();
                &hs
            }
        };
        for &h in hs {
            let cx = px.value(h);
            let cs = ps.value(h);
            let rel = rel_error(cs, cx, spec.eta);
            eta_required = eta_required.max((cs - cx).abs() - spec.eps * cx);
            if rel > worst.0 {
                worst = (rel, idx.to_vec(), h);
            }
        }
    });
    let max_rel_error = worst.0.max(0.0);
    Ok(CoresetCheckReport {
        max_rel_error,
        worst_centers: worst.1.iter().map(|&i| pool[i].clone()).collect(),
        worst_h: worst.2,
        eps: spec.eps,
        eta: spec.eta,
        eta_required: eta_required.max(0.0),
        pass: max_rel_error <= spec.eps + 1e-12,
        subsets_checked: checked,
        pool_size: pool.len(),
        h_mode: match &spec.h {
            HGrid::Values(v) => v.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(","),
            HGrid::Exhaustive => "all".into(),
        },
    })
}

/// Data support plus, for Euclidean data, a `res^d` axis-aligned grid over the
/// bounding box (inclusive endpoints; `res = 1` gives the box center). Finite
/// metrics use every ambient element.
pub fn default_pool(metric: &MetricSpace, x: &WeightedPointSet, res: usize) -> Vec<Point> {
    let mut pool = WeightedPointSet::new();
    match metric {
        MetricSpace::Finite(f) => {
            for i in 0..f.size() {
                pool.insert(Point::Index(i), 1.0);
            }
        }
        _ => {
            for p in x.points() {
                pool.insert(p.clone(), 1.0);
            }
            if let (Some(d), false) = (metric.dim(), res == 0 || x.is_empty()) {
                let coords: Vec<&[f64]> = x.points().iter().filter_map(|p| p.as_coords()).collect();
                if coords.len() == x.len() {
                    let lo: Vec<f64> = (0..d).map(|j| coords.iter().map(|c| c[j]).fold(f64::INFINITY, f64::min)).collect();
                    let hi: Vec<f64> = (0..d).map(|j| coords.iter().map(|c| c[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
                    let axis = |j: usize, t: usize| {
                        if res == 1 {
                            (lo[j] + hi[j]) / 2.0
                        } else {
                            lo[j] + (hi[j] - lo[j]) * t as f64 / (res - 1) as f64
                        }
                    };
                    let total = res.checked_pow(d as u32).unwrap_or(usize::MAX);
                    for code in 0..total.min(1 << 20) {
                        let mut rem = code;
                        let c: Vec<f64> = (0..d)
                            .map(|j| {
                                let t = rem % res;
                                rem /= res;
                                axis(j, t)
                            })
                            .collect();
                        pool.insert(Point::Coords(c), 1.0);
                    }
                }
            }
        }
    }
    pool.points().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(vals: &[f64]) -> WeightedPointSet {
        WeightedPointSet::unit(vals.iter().map(|v| Point::coords(vec![*v])))
    }

    fn wline(items: &[(f64, f64)]) -> WeightedPointSet {
        WeightedPointSet::from_weighted(items.iter().map(|&(v, w)| (Point::coords(vec![v]), w))).unwrap()
    }

    fn centers(vals: &[f64]) -> CenterSet {
        vals.iter().map(|v| Point::coords(vec![*v])).collect()
    }

    const L: MetricSpace = MetricSpace::EuclideanLp { d: 1, p: 2.0 };

    #[test]
    fn cost_examples() {
        let x = line(&[0.0, 3.0]);
        assert_eq!(cost(&L, &x, &centers(&[1.0]), 1).unwrap(), 3.0);
        assert_eq!(cost(&L, &x, &centers(&[1.0]), 2).unwrap(), 5.0);
        let x = wline(&[(3.0, 2.0)]);
        assert_eq!(cost(&L, &x, &centers(&[0.0]), 1).unwrap(), 6.0);
        assert_eq!(cost(&L, &x, &CenterSet::default(), 1), Err(Error::EmptyCenters));
    }

    #[test]
    fn robust_cost_examples() {
        let r = robust_cost(&L, &line(&[0.0, 3.0, 100.0]), &centers(&[1.0]), 1, 1.0).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.outliers.len(), 1);
        assert_eq!(r.outliers.weight_of(&Point::coords(vec![100.0])), 1.0);

        let x = wline(&[(0.0, 1.0), (10.0, 2.0)]);
        let r = robust_cost(&L, &x, &centers(&[0.0]), 1, 1.5).unwrap();
        assert!((r.value - 5.0).abs() < TOL);
        assert_eq!(r.outliers.weight_of(&Point::coords(vec![10.0])), 1.5);

        let r = robust_cost(&L, &x, &centers(&[0.0]), 2, 0.0).unwrap();
        assert_eq!(r.value, cost(&L, &x, &centers(&[0.0]), 2).unwrap());
        assert!(r.outliers.is_empty());

        assert!(matches!(
            robust_cost(&L, &x, &centers(&[0.0]), 1, 3.5),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn robust_cost_ties_break_by_insertion_order() {
        let x = line(&[-1.0, 1.0]);
        let r = robust_cost(&L, &x, &centers(&[0.0]), 1, 1.0).unwrap();
        assert_eq!(r.outliers.points(), &[Point::coords(vec![-1.0])]);
    }

    #[test]
    fn brute_force_examples() {
        let x = line(&[0.0, 1.0, 10.0, 11.0]);
        let (opt, c) = brute_force_opt(&L, &x, 2, 1, 0.0, x.points(), DEFAULT_BUDGET).unwrap();
        assert_eq!(opt, 2.0);
        assert_eq!(cost(&L, &x, &c, 1).unwrap(), 2.0);

        let x = line(&[0.0, 1.0, 100.0]);
        let (opt, _) = brute_force_opt(&L, &x, 1, 1, 1.0, x.points(), DEFAULT_BUDGET).unwrap();
        assert_eq!(opt, 1.0);

        let x = line(&[0.0, 1.0, 2.0]);
        let (opt, _) = brute_force_opt(&L, &x, 5, 2, 0.0, x.points(), DEFAULT_BUDGET).unwrap();
        assert_eq!(opt, 0.0);
    }

    #[test]
    fn brute_force_budget() {
        let x = line(&(0..40).map(f64::from).collect::<Vec<_>>());
        let e = brute_force_opt(&L, &x, 20, 1, 0.0, x.points(), 1000).unwrap_err();
        assert!(matches!(e, Error::Budget { budget: 1000, .. }));
    }

    #[test]
    fn triangle_bound_examples() {
        let (b1, b2) = triangle_bounds(2.0, 3.0, 1, 0.3);
        assert_eq!((b1, b2), (5.0, 5.0));
        let (b1, _) = triangle_bounds(1.0, 1.0, 2, 0.5);
        assert!((b1 - 4.5).abs() < 1e-12);
    }

    #[test]
    fn identity_and_doubled_coresets() {
        let x = line(&[0.0, 1.0, 2.0, 7.0, 9.0, 30.0]);
        let pool = default_pool(&L, &x, 8);
        let spec = CheckSpec::new(2, 2, 2.0, 0.0);
        let r = check_coreset(&L, &x, &x, &spec, &pool).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_rel_error, 0.0);

        let doubled = x.scaled(2.0);
        let r = check_coreset(&L, &x, &doubled, &CheckSpec::new(2, 1, 0.0, 0.5), &pool).unwrap();
        assert!(!r.pass);
        assert!((r.max_rel_error - 1.0).abs() < 1e-12);
        assert!((r.eta_required - 0.0).abs() < TOL || r.eta_required > 0.0);
    }

    #[test]
    fn check_rejects_foreign_points() {
        let x = line(&[0.0, 1.0]);
        let s = line(&[5.0]);
        let e = check_coreset(&L, &x, &s, &CheckSpec::new(1, 1, 0.0, 0.1), x.points()).unwrap_err();
        assert!(matches!(e, Error::NotASubset(_)));
    }

    #[test]
    fn report_round_trip() {
        let x = line(&[0.0, 1.0, 4.0]);
        let s = wline(&[(0.0, 2.0), (4.0, 1.0)]);
        let r = check_coreset(&L, &x, &s, &CheckSpec::new(1, 1, 1.0, 0.1), x.points()).unwrap();
        let back = CoresetCheckReport::from_record(&r.to_record()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn default_grid_contains_half() {
        assert_eq!(default_h_grid(3.0), vec![0.0, 1.0, 1.5, 2.0, 3.0]);
        assert_eq!(default_h_grid(0.0), vec![0.0]);
    }

    #[test]
    fn pool_includes_grid() {
        let m = MetricSpace::euclidean(2);
        let x = WeightedPointSet::unit([Point::coords(vec![0.0, 0.0]), Point::coords(vec![7.0, 7.0])]);
        let pool = default_pool(&m, &x, 8);
        assert_eq!(pool.len(), 64);
        assert!(pool.contains(&Point::coords(vec![1.0, 6.0])));
    }
}
