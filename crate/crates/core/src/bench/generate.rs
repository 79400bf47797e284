use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, WeightedPointSet};
use crate::streaming::Stream;

/// Synthetic dataset: Gaussian clusters truncated at `3 spread`, optional
/// satellite points around each cluster, and far outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    /// Total number of points, outliers included.
    pub n: usize,
    pub d: usize,
    /// Planted clusters; 0 means "use k".
    pub clusters: usize,
    pub spread: f64,
    /// Planted outliers; `m` when absent.
    pub outliers: Option<usize>,
    /// Satellites per cluster per unit of `m`, at `satellite_distance` from the cluster center.
    pub satellites: f64,
    pub satellite_distance: f64,
    /// Outliers sit at distance in `[D, 2D]` from the centroid of the cluster centers.
    pub outlier_distance: f64,
    /// Side of the grid `[1, delta]^d` used for streams.
    pub delta: u64,
    /// Decoy insertions (as a fraction of `n`) that are later deleted.
    pub delete_fraction: f64,
    pub seed: u64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            n: 60,
            d: 2,
            clusters: 0,
            spread: 1.0,
            outliers: None,
            satellites: 0.0,
            satellite_distance: 8.0,
            outlier_distance: 40.0,
            delta: 64,
            delete_fraction: 0.3,
            seed: 0,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("dataset needs n >= 1".into()));
        }
        if self.d == 0 || self.delta < 2 {
            return Err(Error::Parameter("need d >= 1 and delta >= 2".into()));
        }
        let nonneg = [self.spread, self.outlier_distance, self.satellites, self.satellite_distance];
        if nonneg.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || !(0.0..=1.0).contains(&self.delete_fraction) {
            return Err(Error::Parameter("spread, distances and satellites must be finite and >= 0, delete_fraction in [0, 1]".into()));
        }
        Ok(())
    }

    /// Outlier and satellite counts for `k` clusters and budget `m`; inliers fill the rest of `n`.
    fn counts(&self, k: usize, m: usize) -> Result<(usize, usize, usize)> {
        let c = self.cluster_count(k);
        let outliers = self.outliers.unwrap_or(m);
        let sats = (self.satellites * m as f64).round() as usize * c;
        if outliers + sats > self.n {
            return Err(Error::Parameter(format!("n = {} cannot hold {outliers} outliers and {sats} satellites", self.n)));
        }
        Ok((self.n - outliers - sats, sats, outliers))
    }

    fn cluster_count(&self, k: usize) -> usize {
        if self.clusters == 0 {
            k.max(1)
        } else {
            self.clusters
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Raw coordinates of the planted points: inliers (satellites included), then outliers.
fn planted(spec: &DatasetSpec, k: usize, m: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    spec.validate()?;
    let (n_in, n_sat, n_out) = spec.counts(k, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let c = spec.cluster_count(k);
    let side = 20.0 * spec.spread.max(1e-9) * c as f64;
    let centers: Vec<Vec<f64>> = (0..c).map(|_| (0..spec.d).map(|_| rng.random_range(0.0..side)).collect()).collect();
    let centroid: Vec<f64> = (0..spec.d).map(|j| centers.iter().map(|p| p[j]).sum::<f64>() / c as f64).collect();
    let cap = 3.0 * spec.spread;
    let mut inliers: Vec<Vec<f64>> = (0..n_in)
        .map(|i| {
            let mut v = gaussian(&mut rng, spec.d);
            for _ in 0..64 {
                if norm(&v) * spec.spread <= cap {
                    break;
                }
                v = gaussian(&mut rng, spec.d);
            }
            let r = norm(&v) * spec.spread;
            let scale = if r > cap { cap / r } else { 1.0 } * spec.spread;
            centers[i % c].iter().zip(&v).map(|(a, b)| a + b * scale).collect()
        })
        .collect();
    for i in 0..n_sat {
        let v = gaussian(&mut rng, spec.d);
        let r = spec.satellite_distance / norm(&v).max(1e-300);
        inliers.push(centers[i % c].iter().zip(&v).map(|(a, b)| a + b * r).collect());
    }
    let outliers = (0..n_out)
        .map(|_| {
            let v = gaussian(&mut rng, spec.d);
            let r = spec.outlier_distance * rng.random_range(1.0..2.0) / norm(&v).max(1e-300);
            centroid.iter().zip(&v).map(|(a, b)| a + b * r).collect()
        })
        .collect();
    Ok((inliers, outliers))
}

/// Unit-weight dataset for `k` centers and outlier budget `m`.
pub fn gen_dataset(spec: &DatasetSpec, k: usize, m: usize) -> Result<WeightedPointSet> {
    let (inl, out) = planted(spec, k, m)?;
    Ok(WeightedPointSet::unit(inl.into_iter().chain(out).map(Point::Coords)))
}

/// A stream trace together with the decoys it inserts and deletes.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamTrace {
    pub stream: Stream,
    pub decoys: Vec<Vec<u64>>,
}

/// Snaps the planted points to `[1, delta]^d` and interleaves them with
/// `round(delete_fraction n)` decoys, each deleted at a random later position.
pub fn gen_stream(spec: &DatasetSpec, k: usize, m: usize) -> Result<StreamTrace> {
    let (inl, out) = planted(spec, k, m)?;
    let pts: Vec<Vec<f64>> = inl.into_iter().chain(out).collect();
    let d = spec.d;
    let lo: Vec<f64> = (0..d).map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|j| pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let span = (0..d).map(|j| hi[j] - lo[j]).fold(0.0, f64::max).max(1e-12);
    let scale = (spec.delta - 1) as f64 / span;
    let snap = |p: &[f64]| -> Vec<u64> { (0..d).map(|j| 1 + ((p[j] - lo[j]) * scale).round().clamp(0.0, (spec.delta - 1) as f64) as u64).collect() };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed_57ea);
    let decoy_count = (spec.delete_fraction * spec.n as f64).round() as usize;
    let decoys: Vec<Vec<u64>> = (0..decoy_count).map(|_| (0..d).map(|_| rng.random_range(1..=spec.delta)).collect()).collect();
    // Insertions in random order; each decoy deletion lands after its insertion.
    let mut inserts: Vec<(Vec<u64>, Option<usize>)> = pts.iter().map(|p| (snap(p), None)).collect();
    inserts.extend(decoys.iter().cloned().enumerate().map(|(i, c)| (c, Some(i))));
    inserts.shuffle(&mut rng);
    let mut ops: Vec<(Vec<u64>, i64)> = Vec::with_capacity(inserts.len() + decoy_count);
    let mut pending: Vec<Vec<u64>> = Vec::new();
    for (c, decoy) in inserts {
        ops.push((c.clone(), 1));
        if decoy.is_some() {
            pending.push(c);
        }
        if !pending.is_empty() && rng.random_bool(0.5) {
            let i = rng.random_range(0..pending.len());
            ops.push((pending.swap_remove(i), -1));
        }
    }
    ops.extend(pending.into_iter().map(|c| (c, -1)));
    let mut stream = Stream::new(d, spec.delta)?;
    for (c, s) in ops {
        stream.push(c, s)?;
    }
    Ok(StreamTrace { stream, decoys })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{format_dataset, Dataset};
    use crate::metric::MetricSpace;

    #[test]
    fn inliers_stay_within_three_spreads() {
        let spec = DatasetSpec {
            n: 200,
            clusters: 2,
            outliers: Some(0),
            spread: 2.0,
            ..Default::default()
        };
        let (inl, _) = planted(&spec, 2, 3).unwrap();
        let x = gen_dataset(&spec, 2, 3).unwrap();
        assert_eq!(x.total_weight(), 200.0);
        // Cluster i % 2 holds point i; recover the centers from the generator's rng.
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let centers: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(0.0..80.0)).collect()).collect();
        for (i, p) in inl.iter().enumerate() {
            let diff: Vec<f64> = p.iter().zip(&centers[i % 2]).map(|(a, b)| a - b).collect();
            assert!(norm(&diff) <= 6.0 + 1e-9);
        }
    }

    #[test]
    fn zero_points_is_an_error() {
        let spec = DatasetSpec {
            n: 0,
            ..Default::default()
        };
        assert!(gen_dataset(&spec, 1, 0).is_err());
        assert!(gen_stream(&spec, 1, 0).is_err());
        let crowded = DatasetSpec { n: 9, satellites: 2.0, ..Default::default() };
        assert!(gen_dataset(&crowded, 2, 2).is_err());
    }

    #[test]
    fn counts_scale_with_k_and_m() {
        let spec = DatasetSpec { n: 100, satellites: 1.5, ..Default::default() };
        assert_eq!(spec.counts(2, 2).unwrap(), (100 - 2 - 6, 6, 2));
        assert_eq!(spec.counts(4, 4).unwrap(), (100 - 4 - 24, 24, 4));
        let fixed = DatasetSpec { outliers: Some(1), ..spec };
        assert_eq!(fixed.counts(1, 4).unwrap().2, 1);
    }

    #[test]
    fn decoys_cancel() {
        let spec = DatasetSpec {
            n: 50,
            delete_fraction: 1.0,
            ..Default::default()
        };
        let t = gen_stream(&spec, 2, 2).unwrap();
        assert_eq!(t.decoys.len(), 50);
        assert_eq!(t.stream.len(), 150);
        assert_eq!(t.stream.final_multiset().unwrap().total_weight(), 50.0);
        let counts = t.stream.final_counts().unwrap();
        let planted: usize = counts.values().map(|c| *c as usize).sum();
        assert_eq!(planted, 50);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = DatasetSpec {
            seed: 9,
            ..Default::default()
        };
        let text = |s: &DatasetSpec| {
            format_dataset(&Dataset {
                metric: MetricSpace::euclidean(2),
                points: gen_dataset(s, 3, 2).unwrap(),
            })
            .unwrap()
        };
        assert_eq!(text(&spec), text(&spec));
        assert_ne!(text(&spec), text(&DatasetSpec { seed: 10, ..spec.clone() }));
        assert_eq!(gen_stream(&spec, 3, 2).unwrap().stream.to_text(), gen_stream(&spec, 3, 2).unwrap().stream.to_text());
    }
}
