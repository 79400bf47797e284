//! Vanilla (outlier-free) coreset builders, used as black boxes by the reductions.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approx::tri_criteria;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, WeightedPointSet};

/// Where a coreset came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub builder: String,
    pub reduction: String,
    pub eps_target: f64,
    pub eta_budget: f64,
    pub seed: u64,
}

/// A weighted subset of a dataset together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Coreset {
    pub weighted: WeightedPointSet,
    pub provenance: Provenance,
}

impl Coreset {
    /// Number of distinct points.
    pub fn size(&self) -> usize {
        self.weighted.len()
    }
}

/// An algorithm that builds an `eps`-coreset for `(k, z)`-clustering without outliers.
pub trait VanillaBuilder {
    fn name(&self) -> &str;

    fn build(&self, metric: &MetricSpace, x: &WeightedPointSet, k: usize, z: u32, eps: f64, seed: u64) -> Result<Coreset>;

    /// Expected output size for `n` input points.
    fn size_hint(&self, n: usize, k: usize, eps: f64) -> usize;
}

fn provenance(builder: &str, eps: f64, seed: u64) -> Provenance {
    Provenance {
        builder: builder.to_string(),
        reduction: "none".into(),
        eps_target: eps,
        eta_budget: 0.0,
        seed,
    }
}

/// Returns the input unchanged: an exact coreset that isolates reduction error.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityBuilder;

impl VanillaBuilder for IdentityBuilder {
    fn name(&self) -> &str {
        "identity"
    }

    fn build(&self, _: &MetricSpace, x: &WeightedPointSet, _: usize, _: u32, eps: f64, seed: u64) -> Result<Coreset> {
        Ok(Coreset {
            weighted: x.clone(),
            provenance: provenance(self.name(), eps, seed),
        })
    }

    fn size_hint(&self, n: usize, _: usize, _: f64) -> usize {
        n
    }
}

/// Importance sampling with sensitivity upper bounds
/// `sigma(x) = w(x) dist^z(x, C*) / cost(X, C*) + w(x) / w(cluster(x))`
/// taken from an outlier-free tri-criteria solution `C*`.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityBuilder {
    /// Fixed sample count; `None` uses `ceil(c k eps^-2 ln(k / delta))`.
    pub samples: Option<usize>,
    pub c: f64,
    pub delta: f64,
}

impl Default for SensitivityBuilder {
    fn default() -> Self {
        SensitivityBuilder {
            samples: None,
            c: 20.0,
            delta: 0.1,
        }
    }
}

impl SensitivityBuilder {
    pub fn with_samples(s: usize) -> Self {
        SensitivityBuilder {
            samples: Some(s),
            ..Self::default()
        }
    }

    pub fn sample_count(&self, k: usize, eps: f64) -> usize {
        self.samples.unwrap_or_else(|| {
            let k = k.max(1) as f64;
            (self.c * k * (k / self.delta).ln() / (eps * eps)).ceil().max(1.0) as usize
        })
    }
}

impl VanillaBuilder for SensitivityBuilder {
    fn name(&self) -> &str {
        "sensitivity"
    }

    fn build(&self, metric: &MetricSpace, x: &WeightedPointSet, k: usize, z: u32, eps: f64, seed: u64) -> Result<Coreset> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("sensitivity sampling needs eps > 0, got {eps}")));
        }
        let prov = provenance(self.name(), eps, seed);
        if x.is_empty() {
            return Ok(Coreset {
                weighted: WeightedPointSet::new(),
                provenance: prov,
            });
        }
        let s = self.sample_count(k, eps);
        if s >= x.len() {
            // Sampling cannot compress below the support, and X itself is exact.
            return Ok(Coreset {
                weighted: x.clone(),
                provenance: prov,
            });
        }
        let sol = tri_criteria(metric, x, k, z, 0.0, seed)?;
        let n = x.len();
        let mut cluster = vec![0usize; n];
        let mut dz = vec![0.0; n];
        let mut cluster_weight = vec![0.0; sol.centers.len()];
        for (i, (p, w)) in x.iter().enumerate() {
            let (c, d) = sol.centers.nearest(metric, p).ok_or(Error::EmptyCenters)?;
            cluster[i] = c;
            dz[i] = d.powi(z as i32);
            cluster_weight[c] += w;
        }
        let total: f64 = x.weights().iter().zip(&dz).map(|(w, d)| w * d).sum();
        if total <= 0.0 {
            return Ok(Coreset {
                weighted: x.clone(),
                provenance: prov,
            });
        }
        let sigma: Vec<f64> = (0..n)
            .map(|i| x.weight(i) * dz[i] / total + x.weight(i) / cluster_weight[cluster[i]])
            .collect();
        let sigma_total: f64 = sigma.iter().sum();
        let dist = WeightedIndex::new(&sigma).map_err(|e| Error::Invariant(format!("sensitivities: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e45_1717);
        let mut out = WeightedPointSet::new();
        for _ in 0..s {
            let i = dist.sample(&mut rng);
            let p = sigma[i] / sigma_total;
            out.insert(x.point(i).clone(), x.weight(i) / (s as f64 * p));
        }
        Ok(Coreset {
            weighted: out,
            provenance: prov,
        })
    }

    fn size_hint(&self, n: usize, k: usize, eps: f64) -> usize {
        self.sample_count(k, eps).min(n)
    }
}

/// Builder selected by name (`identity` or `sensitivity`).
pub fn builder_by_name(name: &str) -> Result<Box<dyn VanillaBuilder>> {
    match name {
        "identity" => Ok(Box::new(IdentityBuilder)),
        "sensitivity" => Ok(Box::new(SensitivityBuilder::default())),
        other => Err(Error::Parameter(format!("unknown vanilla builder '{other}'"))),
    }
}
