//! The linear sketches behind the streaming pipelines.

use robust_coreset::streaming::{extract_isolated, light_parts_offline, LightOutcome, LightParams, LightSketch, SparseRecovery, TwoLevelSampler};

fn main() -> robust_coreset::Result<()> {
    // Exact recovery of a vector that is sparse only after deletions.
    let mut sr = SparseRecovery::new(4, 0.01, 1)?;
    for key in 0..100u64 {
        sr.update(key, 1);
    }
    for key in 3..100u64 {
        sr.update(key, -1);
    }
    sr.update(7, 5);
    println!("sparse recovery: {:?}", sr.decode());

    // Two-level sampling: a uniform nonzero row, then a uniform column in it.
    let mut s = TwoLevelSampler::new(0.01, 4)?;
    for col in 0..50u64 {
        s.update(1, col, 1);
    }
    s.update(2, 0, 1);
    println!("two-level sample: {:?}", s.sample());

    // Isolated-point extraction over (bucket, point) updates.
    let ups: Vec<(u64, u64, i64)> = (0..30u64).map(|p| (p / 10, p, 1)).collect();
    let g = extract_isolated(&ups, 5, 0.05, 0.2, 3)?;
    println!("isolated draw: {} points, first {:?}", g.len(), g.first());

    // Light buckets: streamed and offline agree.
    let items: Vec<(u64, u64, i64)> = (0..20u64).map(|p| (p % 4, p, 1)).chain([(9, 99, 1)]).collect();
    let params = LightParams { n: 8, m: 2, delta: 0.05 };
    let mut sk = LightSketch::new(params, 5)?;
    for &(b, p, c) in &items {
        sk.update(b, p, c);
    }
    let streamed = sk.finish();
    let offline = light_parts_offline(&items, params, 5)?;
    if let LightOutcome::Parts(parts) = &streamed {
        println!("light buckets: {:?}", parts.iter().map(|p| p.bucket).collect::<Vec<_>>());
    }
    println!("streamed == offline: {}", streamed == offline);
    Ok(())
}
