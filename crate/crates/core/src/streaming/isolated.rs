use super::hash::derive_index;
use super::sampler::TwoLevelSampler;
use crate::error::{Error, Result};

/// `sigma = ceil(c T ln(T / delta))`, the number of draws made by [`IsolatedExtractor`].
pub fn sample_count(t: usize, delta: f64, c: f64) -> usize {
    let t = t.max(1) as f64;
    (c * t * (t / delta).ln()).ceil().max(1.0) as usize
}

/// Draws a set `G` by two-level sampling without replacement: a uniform
/// nonempty bucket, then a uniform point inside it.
///
/// Keeps `sigma` independent samplers over the (bucket, point) matrix. At the
/// end of the stream they are queried in turn, and each drawn point is deleted
/// from all later samplers. A failed sampler draws nothing.
#[derive(Debug, Clone)]
pub struct IsolatedExtractor {
    samplers: Vec<TwoLevelSampler>,
}

impl IsolatedExtractor {
    pub fn new(sigma: usize, delta: f64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Parameter(format!("delta = {delta} must lie in (0, 1)")));
        }
        let per = delta / sigma.max(1) as f64;
        let samplers = (0..sigma).map(|i| TwoLevelSampler::new(per, derive_index(seed, i as u64))).collect::<Result<_>>()?;
        Ok(IsolatedExtractor { samplers })
    }

    pub fn sigma(&self) -> usize {
        self.samplers.len()
    }

    pub fn update(&mut self, bucket: u64, point: u64, delta: i64) {
        for s in &mut self.samplers {
            s.update(bucket, point, delta);
        }
    }

    /// The drawn `(bucket, point)` pairs in draw order; a point may repeat up to its multiplicity.
    pub fn finish(mut self) -> Vec<(u64, u64)> {
        let mut drawn = Vec::new();
        for i in 0..self.samplers.len() {
            if let Some((b, p)) = self.samplers[i].sample() {
                drawn.push((b, p));
                for s in &mut self.samplers[i + 1..] {
                    s.update(b, p, -1);
                }
            }
        }
        drawn
    }
}

/// Runs [`IsolatedExtractor`] over `(bucket, point, sign)` updates.
pub fn extract_isolated(updates: &[(u64, u64, i64)], t: usize, delta: f64, c: f64, seed: u64) -> Result<Vec<(u64, u64)>> {
    if t == 0 {
        return Err(Error::Parameter("T must be at least 1".into()));
    }
    let mut ex = IsolatedExtractor::new(sample_count(t, delta, c), delta, seed)?;
    for &(b, p, s) in updates {
        ex.update(b, p, s);
    }
    Ok(ex.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sigma_formula() {
        assert_eq!(sample_count(10, 0.1, 4.0), (40.0 * 100f64.ln()).ceil() as usize);
        assert_eq!(sample_count(1, 0.5, 1.0), 1);
    }

    #[test]
    fn empty_stream_draws_nothing() {
        assert!(extract_isolated(&[], 3, 0.1, 4.0, 0).unwrap().is_empty());
    }

    #[test]
    fn draws_without_replacement() {
        let ups: Vec<(u64, u64, i64)> = (0..5).map(|p| (p % 2, p, 1)).collect();
        let g = extract_isolated(&ups, 4, 0.1, 4.0, 7).unwrap();
        let distinct: HashSet<u64> = g.iter().map(|(_, p)| *p).collect();
        assert_eq!(distinct.len(), g.len());
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn single_bucket_leaves_at_most_one_bucket() {
        let ups: Vec<(u64, u64, i64)> = (0..40).map(|p| (9, p, 1)).collect();
        let g = extract_isolated(&ups, 2, 0.1, 1.0, 3).unwrap();
        assert!(g.iter().all(|(b, _)| *b == 9));
    }
}
