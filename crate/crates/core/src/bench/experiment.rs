use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::generate::{gen_dataset, gen_stream};
use crate::approx::tri_criteria;
use crate::error::{Error, Result};
use crate::io::{read_dataset, Dataset};
use crate::metric::{MetricSpace, WeightedPointSet};
use crate::objective::{check_coreset, default_pool, CheckSpec, HGrid};
use crate::reduction::{reduction_one, reduction_two, ReductionConfig};
use crate::streaming::{stream_reduction_one, stream_reduction_two, Stream, StreamConfig, VanillaStreamKind, VanillaStreamSpec};
use crate::vanilla::{IdentityBuilder, SensitivityBuilder, VanillaBuilder};

/// One experiment outcome. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub index: usize,
    pub method: String,
    /// Pipeline that produced the coreset, as recorded in its provenance.
    pub pipeline: String,
    pub builder: String,
    pub seed: u64,
    pub dataset_seed: u64,
    /// Distinct points in the dataset.
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub z: u32,
    pub eps: f64,
    pub coreset_size: usize,
    /// Points kept verbatim to absorb outliers (0 for the vanilla builder).
    pub additive_used: usize,
    pub max_rel_error: Option<f64>,
    pub pass: Option<bool>,
    pub wall_time_ms: f64,
    /// Empty on success.
    pub failure: String,
}

/// A dataset materialized for one run.
pub enum Input {
    Points(Dataset),
    Stream(Stream),
}

impl Input {
    pub fn points(&self) -> Result<(MetricSpace, WeightedPointSet)> {
        match self {
            Input::Points(d) => Ok((d.metric.clone(), d.points.clone())),
            Input::Stream(s) => Ok((MetricSpace::euclidean(s.d), s.final_multiset()?)),
        }
    }
}

/// Loads the configured file or generates the dataset for `(k, m, dataset_seed)`.
pub fn load_input(cfg: &ExperimentConfig, k: usize, m: usize, dataset_seed: u64) -> Result<Input> {
    if let Some(p) = &cfg.dataset.path {
        let text = std::fs::read_to_string(p)?;
        return if text.trim_start().starts_with("stream") {
            Ok(Input::Stream(Stream::parse(&text)?))
        } else {
            Ok(Input::Points(read_dataset(p)?))
        };
    }
    let spec = super::generate::DatasetSpec {
        seed: dataset_seed,
        ..cfg.dataset.spec.clone()
    };
    if cfg.algorithm.reduction.is_stream() {
        Ok(Input::Stream(gen_stream(&spec, k, m)?.stream))
    } else {
        Ok(Input::Points(Dataset {
            metric: MetricSpace::euclidean(spec.d),
            points: gen_dataset(&spec, k, m)?,
        }))
    }
}

fn builder(cfg: &ExperimentConfig) -> Box<dyn VanillaBuilder> {
    match cfg.algorithm.builder.as_str() {
        "identity" => Box::new(IdentityBuilder),
        _ => Box::new(SensitivityBuilder {
            samples: cfg.algorithm.samples,
            ..SensitivityBuilder::default()
        }),
    }
}

struct Built {
    coreset: WeightedPointSet,
    pipeline: String,
    additive: usize,
}

fn build(cfg: &ExperimentConfig, input: &Input, k: usize, m: usize, seed: u64) -> Result<Built> {
    let a = &cfg.algorithm;
    match a.reduction {
        Method::StreamOne | Method::StreamTwo => {
            let Input::Stream(s) = input else {
                return Err(Error::Parameter("streaming reductions need a stream input".into()));
            };
            let mut sc = StreamConfig::new(k, a.z, m, a.eps, a.delta).with_seed(seed).with_vanilla(VanillaStreamSpec {
                kind: match a.vanilla_stream.as_str() {
                    "merge-reduce" => VanillaStreamKind::MergeReduce { block: a.block },
                    _ => VanillaStreamKind::Buffered { cap: 4096 },
                },
                builder: a.builder.clone(),
                samples: a.samples,
            });
            if let Some(c) = a.c_sigma {
                sc.c_sigma = c;
            }
            let out = if a.reduction == Method::StreamOne {
                stream_reduction_one(s, &sc)?
            } else {
                stream_reduction_two(s, &sc)?
            };
            Ok(Built {
                additive: out.report.isolated_size + out.report.sparse_size,
                pipeline: out.coreset.provenance.reduction,
                coreset: out.coreset.weighted,
            })
        }
        Method::Vanilla | Method::One | Method::Two => {
            let (metric, x) = input.points()?;
            let b = builder(cfg);
            if a.reduction == Method::Vanilla {
                let c = b.build(&metric, &x, k, a.z, a.eps, seed)?;
                return Ok(Built {
                    coreset: c.weighted,
                    pipeline: "vanilla".into(),
                    additive: 0,
                });
            }
            let rc = ReductionConfig::new(k, a.z, m as f64, a.eps).with_seed(seed);
            let sol = tri_criteria(&metric, &x, k, a.z, m as f64, seed)?;
            let out = if a.reduction == Method::One {
                reduction_one(&metric, &x, &rc, b.as_ref(), &sol)?
            } else {
                reduction_two(&metric, &x, &rc, b.as_ref(), &sol)?
            };
            Ok(Built {
                additive: out.report.verbatim_size,
                pipeline: out.report.pipeline,
                coreset: out.coreset.weighted,
            })
        }
    }
}

/// Runs one `(k, m, trial)` cell. Pipeline failures become a row with
/// `failure` set; only input and verification setup errors are returned.
pub fn run_one(cfg: &ExperimentConfig, index: usize, k: usize, m: usize, trial: usize, root_seed: u64) -> Result<Row> {
    let a = &cfg.algorithm;
    let dataset_seed = cfg.dataset.spec.seed.wrapping_add(trial as u64);
    let seed = root_seed.wrapping_add(trial as u64);
    let input = load_input(cfg, k, m, dataset_seed)?;
    let (metric, x) = input.points()?;
    let mut row = Row {
        index,
        method: a.reduction.name().into(),
        pipeline: String::new(),
        builder: a.builder.clone(),
        seed,
        dataset_seed,
        n: x.len(),
        k,
        m,
        z: a.z,
        eps: a.eps,
        coreset_size: 0,
        additive_used: 0,
        max_rel_error: None,
        pass: None,
        wall_time_ms: 0.0,
        failure: String::new(),
    };
    let t = Instant::now();
    let built = build(cfg, &input, k, m, seed);
    row.wall_time_ms = t.elapsed().as_secs_f64() * 1e3;
    let built = match built {
        Ok(b) => b,
        Err(e) => {
            row.failure = e.to_string();
            return Ok(row);
        }
    };
    row.pipeline = built.pipeline;
    row.coreset_size = built.coreset.len();
    row.additive_used = built.additive;
    let v = &cfg.verification;
    if v.enabled {
        let mut spec = CheckSpec::new(k, a.z, m as f64, a.eps).with_eta(v.eta).with_budget(v.budget as u128);
        if v.exhaustive_h {
            spec = spec.exhaustive();
        } else if let Some(h) = &v.h_grid {
            spec.h = HGrid::Values(h.clone());
        }
        let pool = default_pool(&metric, &x, v.pool_grid);
        match check_coreset(&metric, &x, &built.coreset, &spec, &pool) {
            Ok(r) => {
                row.max_rel_error = Some(r.max_rel_error);
                row.pass = Some(r.pass);
            }
            Err(e) => row.failure = format!("verification: {e}"),
        }
    }
    Ok(row)
}

/// Runs every `(k, m, trial)` cell in config order.
pub fn run_experiment(cfg: &ExperimentConfig, root_seed: u64) -> Result<Vec<Row>> {
    cfg.validate()?;
    let a = &cfg.algorithm;
    let mut rows = Vec::new();
    for k in a.k.values() {
        for m in a.m.values() {
            for trial in 0..a.trials {
                rows.push(run_one(cfg, rows.len(), k, m, trial, root_seed)?);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::OneOrMany;

    fn small(method: Method) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.dataset.spec.n = 30;
        cfg.algorithm.reduction = method;
        cfg.algorithm.builder = "identity".into();
        cfg.algorithm.k = OneOrMany::One(2);
        cfg.algorithm.m = OneOrMany::One(2);
        cfg
    }

    #[test]
    fn identity_reduction_one_is_within_eps() {
        let rows = run_experiment(&small(Method::One), 3).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.failure, "");
        assert_eq!(r.pipeline, "reduction-one");
        assert_eq!(r.pass, Some(true));
        assert!(r.max_rel_error.unwrap() <= 0.2);
    }

    #[test]
    fn sweep_order_and_seeds() {
        let mut cfg = small(Method::Vanilla);
        cfg.algorithm.k = OneOrMany::Many(vec![1, 2]);
        cfg.algorithm.trials = 2;
        cfg.verification.enabled = false;
        let rows = run_experiment(&cfg, 10).unwrap();
        let cells: Vec<(usize, u64)> = rows.iter().map(|r| (r.k, r.seed)).collect();
        assert_eq!(cells, vec![(1, 10), (1, 11), (2, 10), (2, 11)]);
        let untimed = |rows: Vec<Row>| rows.into_iter().map(|r| Row { wall_time_ms: 0.0, ..r }).collect::<Vec<_>>();
        assert_eq!(untimed(rows), untimed(run_experiment(&cfg, 10).unwrap()));
    }

    #[test]
    fn pipeline_failure_is_a_row() {
        // Merge-and-reduce cannot take the deletions of a dynamic stream.
        let mut cfg = small(Method::StreamOne);
        cfg.algorithm.vanilla_stream = "merge-reduce".into();
        cfg.verification.enabled = false;
        let rows = run_experiment(&cfg, 0).unwrap();
        assert!(!rows[0].failure.is_empty());
    }
}
