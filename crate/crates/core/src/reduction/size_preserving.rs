use crate::duplication::{duplicate, separation_for};
use crate::error::{Error, Result};
use crate::metric::{diameter, MetricSpace, Point, WeightedPointSet};
use crate::partition::{sparse_partition, SparsePartition};
use crate::vanilla::{Coreset, VanillaBuilder};

/// Output of [`size_preserving_build`].
#[derive(Debug, Clone, PartialEq)]
pub struct SizePreserving {
    pub coreset: Coreset,
    pub partition: SparsePartition,
    /// `w_X(X_i)` per part.
    pub part_sizes: Vec<f64>,
    /// `w_S(S ∩ X_i)` per part.
    pub part_masses: Vec<f64>,
    /// Copy separation of the duplicated space.
    pub separation: f64,
}

impl SizePreserving {
    /// `max_i |w_S(S ∩ X_i) / w_X(X_i) - 1|`.
    pub fn max_part_deviation(&self) -> f64 {
        self.part_sizes
            .iter()
            .zip(&self.part_masses)
            .map(|(s, m)| if *s > 0.0 { (m / s - 1.0).abs() } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

/// Sparse-partitions `X` with diameter `mu`, moves part `i` to copy `i` of a
/// separated duplication of the space, builds a vanilla coreset there for `k'`
/// centers and maps it back.
pub fn size_preserving_build(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    mu: f64,
    k_prime: usize,
    eps: f64,
    z: u32,
    builder: &dyn VanillaBuilder,
    seed: u64,
) -> Result<SizePreserving> {
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let q = sparse_partition(metric, x, mu)?;
    build_on_partition(metric, x, q, k_prime, eps, z, builder, seed)
}

pub(crate) fn build_on_partition(
    metric: &MetricSpace,
    x: &WeightedPointSet,
    q: SparsePartition,
    k_prime: usize,
    eps: f64,
    z: u32,
    builder: &dyn VanillaBuilder,
    seed: u64,
) -> Result<SizePreserving> {
    let l = q.partition.len();
    let n = (x.len() as f64).max(x.total_weight().ceil());
    let w = separation_for(diameter(metric, x)?, n as usize, z, eps);
    let dup = duplicate(metric, l, w)?;
    let mut part_of = vec![0usize; x.len()];
    let mut lifted = WeightedPointSet::new();
    let mut part_sizes = vec![0.0; l];
    for (i, part) in q.partition.parts.iter().enumerate() {
        for &(j, wj) in &part.members {
            part_of[j] = i;
            part_sizes[i] += wj;
            lifted.insert(Point::dup(x.point(j).clone(), i + 1), wj);
        }
    }
    let built = builder.build(&dup, &lifted, k_prime, z, eps, seed)?;
    let mut s = WeightedPointSet::new();
    let mut part_masses = vec![0.0; l];
    for (p, wp) in built.weighted.iter() {
        let Point::Dup { base, copy } = p else {
            return Err(Error::Invariant("builder returned a point outside the duplicated space".into()));
        };
        let j = x
            .index_of(base)
            .ok_or_else(|| Error::NotASubset("builder output is not a subset of the input".into()))?;
        if part_of[j] + 1 != *copy {
            return Err(Error::Invariant("builder output moved a point across copies".into()));
        }
        part_masses[copy - 1] += wp;
        s.insert((**base).clone(), wp);
    }
    Ok(SizePreserving {
        coreset: Coreset {
            weighted: s,
            provenance: built.provenance,
        },
        partition: q,
        part_sizes,
        part_masses,
        separation: w,
    })
}

/// Rescales each part so its coreset mass equals its exact size:
/// `w'(x) = w(x) |Q| / w(S ∩ Q)` for `x ∈ Q`. Points with no part are kept as is.
pub fn calibrate_weights(s: &WeightedPointSet, part_of: impl Fn(&Point) -> Option<usize>, sizes: &[f64]) -> Result<WeightedPointSet> {
    let mut mass = vec![0.0; sizes.len()];
    let parts: Vec<Option<usize>> = s.points().iter().map(&part_of).collect();
    for (i, p) in parts.iter().enumerate() {
        if let Some(p) = p {
            if *p >= sizes.len() {
                return Err(Error::Parameter(format!("part {p} has no size")));
            }
            mass[*p] += s.weight(i);
        }
    }
    for (part, (&size, &m)) in sizes.iter().zip(&mass).enumerate() {
        if size > 0.0 && m <= 0.0 {
            return Err(Error::Calibration { part, size });
        }
    }
    let mut out = WeightedPointSet::new();
    for (i, (p, w)) in s.iter().enumerate() {
        let w = match parts[i] {
            Some(q) => w * sizes[q] / mass[q],
            None => w,
        };
        out.insert(p.clone(), w);
    }
    Ok(out)
}
