use super::hash::derive_seed;
use super::recovery::SparseRecovery;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point, WeightedPointSet};
use crate::vanilla::{IdentityBuilder, SensitivityBuilder, VanillaBuilder};

/// A dynamic-stream vanilla coreset construction.
pub trait VanillaStream {
    fn name(&self) -> &str;

    /// Applies `delta` copies of the point with key `key`.
    fn update(&mut self, key: u64, point: &Point, delta: i64) -> Result<()>;

    /// Builds the coreset; `decode` maps keys back to points.
    fn finish(self: Box<Self>, decode: &dyn Fn(u64) -> Point) -> Result<WeightedPointSet>;
}

/// Which vanilla stream to instantiate and which offline builder it wraps.
#[derive(Debug, Clone, PartialEq)]
pub struct VanillaStreamSpec {
    pub kind: VanillaStreamKind,
    /// `identity` or `sensitivity`.
    pub builder: String,
    /// Fixed sample count for the sensitivity builder.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanillaStreamKind {
    /// Sparse recovery of the final multiset up to `cap` points, then the offline builder.
    Buffered { cap: usize },
    /// Merge-and-reduce over blocks of `block` insertions.
    MergeReduce { block: usize },
}

impl VanillaStreamKind {
    pub fn name(&self) -> &'static str {
        match self {
            VanillaStreamKind::Buffered { .. } => "buffered",
            VanillaStreamKind::MergeReduce { .. } => "merge-reduce",
        }
    }
}

impl Default for VanillaStreamSpec {
    fn default() -> Self {
        VanillaStreamSpec {
            kind: VanillaStreamKind::Buffered { cap: 4096 },
            builder: "sensitivity".into(),
            samples: None,
        }
    }
}

impl VanillaStreamSpec {
    pub fn builder(&self) -> Result<Box<dyn VanillaBuilder>> {
        match self.builder.as_str() {
            "identity" => Ok(Box::new(IdentityBuilder)),
            "sensitivity" => Ok(Box::new(SensitivityBuilder {
                samples: self.samples,
                ..SensitivityBuilder::default()
            })),
            other => Err(Error::Parameter(format!("unknown vanilla builder '{other}'"))),
        }
    }

    pub fn make(&self, metric: &MetricSpace, k: usize, z: u32, eps: f64, delta: f64, seed: u64) -> Result<Box<dyn VanillaStream>> {
        let builder = self.builder()?;
        let ctx = Context {
            metric: metric.clone(),
            k,
            z,
            eps,
            seed,
        };
        Ok(match self.kind {
            VanillaStreamKind::Buffered { cap } => Box::new(BufferedExact {
                recovery: SparseRecovery::new(cap, delta, derive_seed(seed, "buffered"))?,
                builder,
                ctx,
            }),
            VanillaStreamKind::MergeReduce { block } => {
                if block == 0 {
                    return Err(Error::Parameter("merge-and-reduce needs a positive block size".into()));
                }
                Box::new(MergeReduce {
                    block,
                    buffer: WeightedPointSet::new(),
                    levels: Vec::new(),
                    reductions: 0,
                    builder,
                    ctx,
                })
            }
        })
    }
}

#[derive(Debug, Clone)]
struct Context {
    metric: MetricSpace,
    k: usize,
    z: u32,
    eps: f64,
    seed: u64,
}

/// Recovers the final multiset exactly, then runs the offline builder on it.
pub struct BufferedExact {
    recovery: SparseRecovery,
    builder: Box<dyn VanillaBuilder>,
    ctx: Context,
}

impl VanillaStream for BufferedExact {
    fn name(&self) -> &str {
        "buffered"
    }

    fn update(&mut self, key: u64, _: &Point, delta: i64) -> Result<()> {
        self.recovery.update(key, delta);
        Ok(())
    }

    fn finish(self: Box<Self>, decode: &dyn Fn(u64) -> Point) -> Result<WeightedPointSet> {
        let items = self
            .recovery
            .decode()
            .ok_or_else(|| Error::Stream(format!("buffered stream holds more than {} points", self.recovery.capacity())))?;
        let mut x = WeightedPointSet::new();
        for (key, c) in items {
            if c < 0 {
                return Err(Error::Stream(format!("key {key} ends with multiplicity {c}")));
            }
            x.push(decode(key), c as f64)?;
        }
        let c = &self.ctx;
        if x.is_empty() {
            return Ok(x);
        }
        Ok(self.builder.build(&c.metric, &x, c.k, c.z, c.eps, c.seed)?.weighted)
    }
}

/// Insertion-only merge-and-reduce: full blocks are reduced by the builder and
/// equal-level summaries are merged and reduced again.
pub struct MergeReduce {
    block: usize,
    buffer: WeightedPointSet,
    levels: Vec<Option<WeightedPointSet>>,
    reductions: u64,
    builder: Box<dyn VanillaBuilder>,
    ctx: Context,
}

impl MergeReduce {
    fn reduce(&mut self, x: &WeightedPointSet) -> Result<WeightedPointSet> {
        self.reductions += 1;
        let c = &self.ctx;
        Ok(self.builder.build(&c.metric, x, c.k, c.z, c.eps, c.seed.wrapping_add(self.reductions))?.weighted)
    }
}

impl VanillaStream for MergeReduce {
    fn name(&self) -> &str {
        "merge-reduce"
    }

    fn update(&mut self, _: u64, point: &Point, delta: i64) -> Result<()> {
        if delta < 0 {
            return Err(Error::Stream("merge-and-reduce accepts insertions only".into()));
        }
        for _ in 0..delta {
            self.buffer.push(point.clone(), 1.0)?;
            if self.buffer.total_weight() >= self.block as f64 {
                let full = std::mem::take(&mut self.buffer);
                let mut carry = self.reduce(&full)?;
                let mut l = 0;
                loop {
                    if l == self.levels.len() {
                        self.levels.push(None);
                    }
                    match self.levels[l].take() {
                        Some(prev) => {
                            carry = self.reduce(&prev.union(&carry))?;
                            l += 1;
                        }
                        None => {
                            self.levels[l] = Some(carry);
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self: Box<Self>, _: &dyn Fn(u64) -> Point) -> Result<WeightedPointSet> {
        Ok(self.levels.iter().flatten().fold(self.buffer.clone(), |acc, s| acc.union(s)))
    }
}
