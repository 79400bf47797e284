//! The three bounded-diameter partitions: almost-dense decomposition,
//! ball-carving sparse partition and consistent hashing.

use robust_coreset::approx::tri_criteria;
use robust_coreset::bench::{gen_dataset, DatasetSpec};
use robust_coreset::partition::{almost_dense_decomposition, partition_from_hash, sparse_partition, ConsistentHash, PartTag};
use robust_coreset::MetricSpace;

fn main() -> robust_coreset::Result<()> {
    let spec = DatasetSpec { n: 120, seed: 2, ..Default::default() };
    let x = gen_dataset(&spec, 3, 4)?;
    let metric = MetricSpace::euclidean(2);

    let sol = tri_criteria(&metric, &x, 3, 1, 4.0, 0)?;
    let dec = almost_dense_decomposition(&metric, &x, &sol, 3.0, 0.25, 4.0)?;
    println!(
        "almost-dense: {} dense parts (weight {}), {} sparse parts (weight {}), max diameter {:.2} <= {}",
        dec.count_with(|t| t == PartTag::Dense),
        dec.weight_with(|t| t == PartTag::Dense),
        dec.count_with(PartTag::is_sparse),
        dec.weight_with(PartTag::is_sparse),
        dec.max_diameter(&metric, &x),
        2.0 * 3.0
    );

    let sp = sparse_partition(&metric, &x, 4.0)?;
    println!("sparse partition: {} parts, Gamma {}, measured Lambda {}", sp.partition.len(), sp.gamma, sp.lambda);

    let phi = ConsistentHash::new(2, 4.0, 9)?;
    let (hp, ids) = partition_from_hash(&phi, &x)?;
    println!(
        "consistent hash: {} buckets, max diameter {:.2} <= 4, analytic Lambda for radius 1: {}; first bucket {:?}",
        hp.len(),
        hp.max_diameter(&metric, &x),
        phi.lambda_bound(1.0),
        ids[0]
    );
    Ok(())
}
