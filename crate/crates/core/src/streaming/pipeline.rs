use std::collections::HashMap;

use super::hash::{derive_index, derive_seed};
use super::isolated::{sample_count, IsolatedExtractor};
use super::light::{LightOutcome, LightParams, LightSketch};
use super::recovery::SparseRecovery;
use super::stream::Stream;
use super::vanilla_stream::VanillaStreamSpec;
use crate::duplication::separation_for;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, WeightedPointSet};
use crate::partition::ConsistentHash;
use crate::reduction::calibrate_weights;
use crate::vanilla::{Coreset, Provenance};

/// Parameters of the streaming pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub k: usize,
    pub z: u32,
    pub m: usize,
    /// Target accuracy; internal steps run at `eps / c_scale`.
    pub eps: f64,
    /// Overall failure probability, split evenly across OPT guesses.
    pub delta: f64,
    pub xi: f64,
    pub c_scale: f64,
    /// Constant in the isolation target `T`.
    pub c_t: f64,
    /// Constant in the draw count `sigma = c T ln(T / delta)`.
    pub c_sigma: f64,
    /// Constant in the bucket budget `N = c k d max(1, log2 d)`.
    pub c_n: f64,
    pub seed: u64,
    pub vanilla: VanillaStreamSpec,
}

impl StreamConfig {
    pub fn new(k: usize, z: u32, m: usize, eps: f64, delta: f64) -> Self {
        StreamConfig {
            k,
            z,
            m,
            eps,
            delta,
            xi: 3.0,
            c_scale: 4.0,
            c_t: 1.0,
            c_sigma: 0.05,
            c_n: 2.0,
            seed: 0,
            vanilla: VanillaStreamSpec::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_vanilla(mut self, vanilla: VanillaStreamSpec) -> Self {
        self.vanilla = vanilla;
        self
    }

    pub fn eps_in(&self) -> f64 {
        self.eps / self.c_scale
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.z == 0 {
            return Err(Error::Parameter("k and z must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter("eps and delta must lie in (0, 1)".into()));
        }
        if !(self.c_scale >= 1.0) || !(self.xi >= 0.0) || !(self.c_t > 0.0) || !(self.c_sigma > 0.0) || !(self.c_n > 0.0) {
            return Err(Error::Parameter("constants must be positive (c_scale >= 1)".into()));
        }
        Ok(())
    }

    /// `N = ceil(c_n k d max(1, log2 d))`.
    pub fn bucket_budget(&self, d: usize) -> usize {
        (self.c_n * (self.k * d) as f64 * (d as f64).log2().max(1.0)).ceil() as usize
    }

    /// `M = ceil((1 + 1/eps) m)`.
    pub fn light_bound(&self) -> usize {
        ((1.0 + 1.0 / self.eps_in()) * self.m as f64 - 1e-9).ceil().max(1.0) as usize
    }

    /// `T = ceil(c_t m d^z / eps)` for the first pipeline.
    pub fn isolation_target_one(&self, d: usize) -> usize {
        (self.c_t * self.m as f64 * (d as f64).powi(self.z as i32) / self.eps_in()).ceil().max(1.0) as usize
    }

    /// `T = ceil(c_t m (d / eps)^(2z))` for the second pipeline, saturating.
    pub fn isolation_target_two(&self, d: usize) -> usize {
        let t = self.c_t * self.m as f64 * (d as f64 / self.eps_in()).powi(2 * self.z as i32);
        t.ceil().clamp(1.0, 1e15) as usize
    }

    /// Number of OPT guesses `tau = floor(log_(z+1)(n (sqrt(d) delta)^z)) + 1`.
    pub fn guess_count(&self, n: usize, d: usize, delta: u64) -> usize {
        let z = self.z as f64;
        let top = n.max(1) as f64 * ((d as f64).sqrt() * delta as f64).powf(z);
        (top.ln() / (z + 1.0).ln()).floor().max(0.0) as usize + 1
    }
}

/// How one OPT guess ended.
#[derive(Debug, Clone, PartialEq)]
pub enum GuessOutcome {
    Accepted,
    /// The guess was too small: too many buckets survived.
    Overflow,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuessReport {
    pub index: usize,
    pub opt_guess: f64,
    /// Diameter bound of the bucket hash.
    pub lambda: f64,
    pub sigma: usize,
    /// Points drawn into `G` (with multiplicity).
    pub drawn: usize,
    pub outcome: GuessOutcome,
}

/// Measurements of a streaming run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamReport {
    pub pipeline: String,
    pub updates: usize,
    pub tau: usize,
    pub isolation_target: usize,
    pub bucket_budget: usize,
    pub light_bound: usize,
    pub guesses: Vec<GuessReport>,
    pub chosen: Option<usize>,
    /// True when the final multiset was small enough to recover outright.
    pub exact: bool,
    pub isolated_size: usize,
    pub sparse_size: usize,
    pub dense_coreset_size: usize,
    /// Buckets met by a fine bucket (second pipeline).
    pub lambda_count: Option<usize>,
    pub k_prime: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamOutput {
    pub coreset: Coreset,
    pub report: StreamReport,
}

struct Prepared {
    keys: Vec<u64>,
    points: HashMap<u64, Point>,
}

fn prepare(stream: &Stream) -> Result<Prepared> {
    let mut keys = Vec::with_capacity(stream.len());
    let mut points = HashMap::new();
    for u in &stream.updates {
        let k = stream.key(&u.coords)?;
        points.entry(k).or_insert_with(|| stream.point_of(k));
        keys.push(k);
    }
    Ok(Prepared { keys, points })
}

fn provenance(cfg: &StreamConfig, pipeline: &str) -> Provenance {
    Provenance {
        builder: format!("{}/{}", cfg.vanilla.builder, cfg.vanilla.kind.name()),
        reduction: pipeline.into(),
        eps_target: cfg.eps,
        eta_budget: 0.0,
        seed: cfg.seed,
    }
}

/// Recovers the final multiset outright when it has at most `k + m + 1` distinct points.
fn try_exact(stream: &Stream, prep: &Prepared, cfg: &StreamConfig) -> Result<Option<WeightedPointSet>> {
    let mut sk = SparseRecovery::new(cfg.k + cfg.m + 1, cfg.delta, derive_seed(cfg.seed, "exact"))?;
    for (u, &key) in stream.updates.iter().zip(&prep.keys) {
        sk.update(key, u.sign);
    }
    let Some(items) = sk.decode() else { return Ok(None) };
    let mut x = WeightedPointSet::new();
    for (key, c) in items {
        if c < 0 {
            return Err(Error::Stream(format!("point {:?} ends with multiplicity {c}", stream.coords_of(key))));
        }
        x.push(prep.points[&key].clone(), c as f64)?;
    }
    Ok(Some(x))
}

fn vanilla_only(stream: &Stream, prep: &Prepared, cfg: &StreamConfig) -> Result<WeightedPointSet> {
    let metric = MetricSpace::euclidean(stream.d);
    let mut c = cfg.vanilla.make(&metric, cfg.k, cfg.z, cfg.eps_in(), cfg.delta, derive_seed(cfg.seed, "vanilla"))?;
    for (u, &key) in stream.updates.iter().zip(&prep.keys) {
        c.update(key, &prep.points[&key], u.sign)?;
    }
    c.finish(&|k| stream.point_of(k))
}

fn bucket_ids(phi: &ConsistentHash, stream: &Stream, prep: &Prepared) -> Result<HashMap<u64, u64>> {
    prep.points
        .iter()
        .map(|(k, p)| Ok((*k, phi.bucket_index(&phi.eval(p)?, stream.delta)?)))
        .collect()
}

fn add_counts(out: &mut WeightedPointSet, items: impl IntoIterator<Item = (Point, f64)>) {
    for (p, w) in items {
        if w > 0.0 {
            out.push(p, w).expect("positive finite weight");
        }
    }
}

struct GuessResult {
    coreset: WeightedPointSet,
    isolated: usize,
    sparse: usize,
    dense: usize,
}

fn guess_one(stream: &Stream, prep: &Prepared, cfg: &StreamConfig, lambda: f64, sigma: usize, per_delta: f64, seed: u64) -> Result<(usize, std::result::Result<GuessResult, GuessOutcome>)> {
    let d = stream.d;
    let phi = ConsistentHash::new(d, lambda, derive_seed(seed, "phi"))?;
    let bucket = bucket_ids(&phi, stream, prep)?;
    let metric = MetricSpace::euclidean(d);
    let mut iso = IsolatedExtractor::new(sigma, per_delta, derive_seed(seed, "isolated"))?;
    let params = LightParams {
        n: cfg.bucket_budget(d),
        m: cfg.light_bound(),
        delta: per_delta,
    };
    let mut light = LightSketch::new(params, derive_seed(seed, "light"))?;
    let mut dense = cfg.vanilla.make(&metric, cfg.k, cfg.z, cfg.eps_in(), per_delta, derive_seed(seed, "vanilla"))?;
    for (u, &key) in stream.updates.iter().zip(&prep.keys) {
        let b = bucket[&key];
        iso.update(b, key, u.sign);
        light.update(b, key, u.sign);
        dense.update(key, &prep.points[&key], u.sign)?;
    }
    let drawn = iso.finish();
    let mut g: HashMap<u64, i64> = HashMap::new();
    for &(b, key) in &drawn {
        light.update(b, key, -1);
        let p = prep.points.get(&key).ok_or_else(|| Error::Invariant(format!("sampler returned unknown key {key}")))?;
        dense.update(key, p, -1)?;
        *g.entry(key).or_default() += 1;
    }
    let parts = match light.finish() {
        LightOutcome::Parts(p) => p,
        LightOutcome::Overflow => return Ok((drawn.len(), Err(GuessOutcome::Overflow))),
        LightOutcome::Failed(msg) => return Ok((drawn.len(), Err(GuessOutcome::Failed(msg)))),
    };
    let mut sparse = WeightedPointSet::new();
    for part in &parts {
        for &(key, c) in &part.points {
            dense.update(key, &prep.points[&key], -c)?;
            add_counts(&mut sparse, [(prep.points[&key].clone(), c as f64)]);
        }
    }
    let s_dense = match dense.finish(&|k| stream.point_of(k)) {
        Ok(s) => s,
        Err(e) => return Ok((drawn.len(), Err(GuessOutcome::Failed(e.to_string())))),
    };
    let mut isolated = WeightedPointSet::new();
    let mut gs: Vec<(u64, i64)> = g.into_iter().collect();
    gs.sort_unstable();
    add_counts(&mut isolated, gs.iter().map(|(k, c)| (prep.points[k].clone(), *c as f64)));
    Ok((
        drawn.len(),
        Ok(GuessResult {
            isolated: isolated.len(),
            sparse: sparse.len(),
            dense: s_dense.len(),
            coreset: s_dense.union(&sparse).union(&isolated),
        }),
    ))
}

struct GuessFrame<'a> {
    stream: &'a Stream,
    prep: Prepared,
    cfg: &'a StreamConfig,
    report: StreamReport,
}

fn run_guesses<F>(mut f: GuessFrame<'_>, name: &str, target: usize, mut guess: F) -> Result<StreamOutput>
where
    F: FnMut(&Stream, &Prepared, usize, f64, usize, f64, u64) -> Result<(f64, usize, std::result::Result<GuessResult, GuessOutcome>)>,
{
    let cfg = f.cfg;
    let stream = f.stream;
    f.report.pipeline = name.into();
    f.report.updates = stream.len();
    f.report.isolation_target = target;
    f.report.bucket_budget = cfg.bucket_budget(stream.d);
    f.report.light_bound = cfg.light_bound();
    if let Some(x) = try_exact(stream, &f.prep, cfg)? {
        f.report.exact = true;
        f.report.sparse_size = x.len();
        return Ok(StreamOutput {
            coreset: Coreset {
                weighted: x,
                provenance: provenance(cfg, name),
            },
            report: f.report,
        });
    }
    if cfg.m == 0 {
        let s = vanilla_only(stream, &f.prep, cfg)?;
        f.report.dense_coreset_size = s.len();
        return Ok(StreamOutput {
            coreset: Coreset {
                weighted: s,
                provenance: provenance(cfg, name),
            },
            report: f.report,
        });
    }
    let n = stream.insertions();
    let tau = cfg.guess_count(n, stream.d, stream.delta);
    let per_delta = cfg.delta / tau as f64;
    // Once every point can be drawn, more draws change nothing.
    let sigma = sample_count(target, per_delta, cfg.c_sigma).min(n.max(1));
    f.report.tau = tau;
    let root = derive_seed(cfg.seed, name);
    for i in 0..tau {
        let opt = (cfg.z as f64 + 1.0).powi(i as i32);
        let (lambda, drawn, res) = match guess(stream, &f.prep, i, opt, sigma, per_delta, derive_index(root, i as u64)) {
            Ok(r) => r,
            Err(e) => (f64::NAN, 0, Err(GuessOutcome::Failed(e.to_string()))),
        };
        let mut g = GuessReport {
            index: i,
            opt_guess: opt,
            lambda,
            sigma,
            drawn,
            outcome: GuessOutcome::Accepted,
        };
        match res {
            Ok(r) => {
                f.report.guesses.push(g);
                f.report.chosen = Some(i);
                f.report.isolated_size = r.isolated;
                f.report.sparse_size = r.sparse;
                f.report.dense_coreset_size = r.dense;
                return Ok(StreamOutput {
                    coreset: Coreset {
                        weighted: r.coreset,
                        provenance: provenance(cfg, name),
                    },
                    report: f.report,
                });
            }
            Err(o) => {
                g.outcome = o;
                f.report.guesses.push(g);
            }
        }
    }
    Err(Error::Pipeline(format!("all {tau} OPT guesses failed or overflowed")))
}

/// Streaming form of the first reduction.
///
/// For each guess `OPT_i = (z+1)^i` (smallest first) the stream is bucketed by
/// a consistent hash of diameter `lambda = (z+1)^-xi (eps OPT_i / m)^(1/z)`;
/// isolated points `G` are drawn, light buckets `X_S` of `X \ G` are recovered,
/// and the vanilla stream sees `X \ (G ∪ X_S)` through deletion replay. The
/// first guess that does not overflow wins.
pub fn stream_reduction_one(stream: &Stream, cfg: &StreamConfig) -> Result<StreamOutput> {
    cfg.validate()?;
    let frame = GuessFrame {
        stream,
        prep: prepare(stream)?,
        cfg,
        report: StreamReport::default(),
    };
    let eps = cfg.eps_in();
    let z = cfg.z as f64;
    run_guesses(frame, "stream-one", cfg.isolation_target_one(stream.d), |s, prep, _, opt, sigma, pd, seed| {
        let lambda = (z + 1.0).powf(-cfg.xi) * (eps * opt / cfg.m as f64).powf(1.0 / z);
        let (drawn, r) = guess_one(s, prep, cfg, lambda, sigma, pd, seed)?;
        Ok((lambda, drawn, r))
    })
}

/// Streaming form of the second reduction.
///
/// Per guess, a coarse hash `phi` of diameter `mu = (z+1)^-xi eps (OPT_i/m)^(1/z)`
/// and a fine hash `phi'` of diameter `eps mu / (z d)`. Isolated points are
/// drawn against `phi'`; the rest is lifted to `(x, index(phi(x)) w')` in
/// `R^(d+1)` for the vanilla stream with `k' = (k + 2k Lambda^2 + 2k Lambda) Lambda`,
/// and bucket sizes of `phi` are recovered with a `2k Lambda^2`-sparse sketch to
/// calibrate the weights. Overflow of that sketch rejects the guess.
pub fn stream_reduction_two(stream: &Stream, cfg: &StreamConfig) -> Result<StreamOutput> {
    cfg.validate()?;
    let frame = GuessFrame {
        stream,
        prep: prepare(stream)?,
        cfg,
        report: StreamReport::default(),
    };
    let eps = cfg.eps_in();
    let z = cfg.z as f64;
    let d = stream.d;
    let mut lambda_count = None;
    let mut k_prime = None;
    let mut out = run_guesses(frame, "stream-two", cfg.isolation_target_two(d), |s, prep, _, opt, sigma, pd, seed| {
        let mu = (z + 1.0).powf(-cfg.xi) * eps * (opt / cfg.m as f64).powf(1.0 / z);
        let fine = eps * mu / (z * d as f64);
        let phi = ConsistentHash::new(d, mu, derive_seed(seed, "phi"))?;
        let phi_fine = ConsistentHash::new(d, fine, derive_seed(seed, "phi-fine"))?;
        let lam = phi.lambda_bound(fine);
        let k2 = 2 * cfg.k * lam * lam;
        let kp = (cfg.k + k2 + 2 * cfg.k * lam) * lam;
        lambda_count = Some(lam);
        k_prime = Some(kp);
        let coarse = bucket_ids(&phi, s, prep)?;
        let fine_ids = bucket_ids(&phi_fine, s, prep)?;
        let w = separation_for((d as f64).sqrt() * s.delta as f64, (s.delta as usize).saturating_pow(d as u32), cfg.z, eps);
        let lift = |key: u64| -> Point {
            let mut c = s.point_of(key).as_coords().expect("grid point").to_vec();
            c.push(coarse[&key] as f64 * w);
            Point::Coords(c)
        };
        let mut iso = IsolatedExtractor::new(sigma, pd, derive_seed(seed, "isolated"))?;
        let mut counts = SparseRecovery::new(k2.max(1), pd, derive_seed(seed, "counts"))?;
        let lifted = MetricSpace::euclidean(d + 1);
        let mut van = cfg.vanilla.make(&lifted, kp, cfg.z, eps, pd, derive_seed(seed, "vanilla"))?;
        let mut lifted_pts: HashMap<u64, Point> = HashMap::new();
        for (u, &key) in s.updates.iter().zip(&prep.keys) {
            iso.update(fine_ids[&key], key, u.sign);
            counts.update(coarse[&key], u.sign);
            let p = lifted_pts.entry(key).or_insert_with(|| lift(key));
            van.update(key, p, u.sign)?;
        }
        let drawn = iso.finish();
        let mut g: HashMap<u64, i64> = HashMap::new();
        for &(_, key) in &drawn {
            counts.update(coarse[&key], -1);
            van.update(key, &lifted_pts[&key], -1)?;
            *g.entry(key).or_default() += 1;
        }
        let Some(sizes) = counts.decode() else {
            return Ok((mu, drawn.len(), Err(GuessOutcome::Overflow)));
        };
        let s_lifted = match van.finish(&lift) {
            Ok(x) => x,
            Err(e) => return Ok((mu, drawn.len(), Err(GuessOutcome::Failed(e.to_string())))),
        };
        let part_of: HashMap<u64, usize> = sizes.iter().enumerate().map(|(i, (b, _))| (*b, i)).collect();
        let sizes_f: Vec<f64> = sizes.iter().map(|(_, c)| *c as f64).collect();
        let mut s_base = WeightedPointSet::new();
        for (p, wp) in s_lifted.iter() {
            let c = p.as_coords().expect("lifted point");
            add_counts(&mut s_base, [(Point::Coords(c[..d].to_vec()), wp)]);
        }
        let bucket_of = |p: &Point| phi.eval(p).ok().and_then(|b| phi.bucket_index(&b, s.delta).ok()).and_then(|b| part_of.get(&b).copied());
        let calibrated = match calibrate_weights(&s_base, bucket_of, &sizes_f) {
            Ok(x) => x,
            Err(e) => return Ok((mu, drawn.len(), Err(GuessOutcome::Failed(e.to_string())))),
        };
        let mut isolated = WeightedPointSet::new();
        let mut gs: Vec<(u64, i64)> = g.into_iter().collect();
        gs.sort_unstable();
        add_counts(&mut isolated, gs.iter().map(|(k, c)| (prep.points[k].clone(), *c as f64)));
        Ok((
            mu,
            drawn.len(),
            Ok(GuessResult {
                isolated: isolated.len(),
                sparse: 0,
                dense: calibrated.len(),
                coreset: calibrated.union(&isolated),
            }),
        ))
    })?;
    out.report.lambda_count = lambda_count;
    out.report.k_prime = k_prime;
    Ok(out)
}
