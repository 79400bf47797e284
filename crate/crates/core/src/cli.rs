//! Command-line front end: `gen`, `run`, `check` and `stream-run`.
//!
//! Exit codes: 0 success, 2 verification failure, 3 pipeline failure, 4 usage error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{emit_report, gen_dataset, gen_stream, run_experiment, DatasetSpec, ExperimentConfig, Method, OneOrMany, ReportFormat};
use crate::error::{Error, Result};
use crate::io::{format_dataset, read_dataset, Dataset};
use crate::metric::MetricSpace;
use crate::objective::{check_coreset, default_pool, CheckSpec, HGrid};
use crate::streaming::{stream_reduction_one, stream_reduction_two, Stream, StreamConfig, VanillaStreamSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_PIPELINE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "robust-coreset", version, about = "Coresets for clustering with outliers")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset or stream trace.
    Gen(GenArgs),
    /// Run an experiment and emit a report.
    Run(RunArgs),
    /// Check a coreset against a dataset by exhaustive enumeration.
    Check(CheckArgs),
    /// Run a streaming reduction over a stream file.
    StreamRun(StreamRunArgs),
}

#[derive(Debug, Args, Default)]
struct DatasetFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    outliers: Option<usize>,
    #[arg(long)]
    satellites: Option<f64>,
    #[arg(long)]
    satellite_distance: Option<f64>,
    #[arg(long)]
    outlier_distance: Option<f64>,
    /// Grid side for streams.
    #[arg(long)]
    grid: Option<u64>,
    #[arg(long)]
    delete_fraction: Option<f64>,
    #[arg(long)]
    dataset_seed: Option<u64>,
}

impl DatasetFlags {
    fn apply(&self, s: &mut DatasetSpec) {
        macro_rules! set {
            ($($f:ident => $g:ident),*) => {$( if let Some(v) = self.$f { s.$g = v; } )*};
        }
        set!(n => n, d => d, clusters => clusters, spread => spread, satellites => satellites,
             satellite_distance => satellite_distance, outlier_distance => outlier_distance,
             grid => delta, delete_fraction => delete_fraction, dataset_seed => seed);
        if self.outliers.is_some() {
            s.outliers = self.outliers;
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Experiment config; only `[dataset]` and the first `k` and `m` are used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    dataset: DatasetFlags,
    /// Cluster count when `clusters` is 0.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Outlier count when `outliers` is unset; scales satellites.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Emit a stream trace instead of a dataset.
    #[arg(long)]
    stream: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed of every algorithm run.
    #[arg(long)]
    seed: u64,
    /// Dataset or stream file instead of a generated dataset.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    dataset: DatasetFlags,
    #[arg(long)]
    reduction: Option<Method>,
    #[arg(long)]
    builder: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    z: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    c_sigma: Option<f64>,
    #[arg(long)]
    pool_grid: Option<usize>,
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    coreset: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    z: u32,
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 8)]
    pool_grid: usize,
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<f64>>,
    #[arg(long)]
    exhaustive_h: bool,
}

#[derive(Debug, Args)]
struct StreamRunArgs {
    #[arg(long)]
    stream: PathBuf,
    /// `one` or `two`.
    #[arg(long, default_value = "one")]
    reduction: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    z: u32,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sensitivity")]
    builder: String,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    c_sigma: Option<f64>,
    /// Coreset output in dataset format; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the coreset against the final multiset.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 8)]
    pool_grid: usize,
}

fn usage(e: &Error) -> bool {
    matches!(e, Error::Parse { .. } | Error::Io(_) | Error::Parameter(_) | Error::InvalidPoint(_) | Error::InvalidMetric(_))
}

fn write_or_print(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let (mut spec, k, m) = match &a.config {
        Some(p) => {
            let cfg = ExperimentConfig::load(p)?;
            (cfg.dataset.spec.clone(), cfg.algorithm.k.values()[0], cfg.algorithm.m.values()[0])
        }
        None => (DatasetSpec::default(), a.k, a.m),
    };
    a.dataset.apply(&mut spec);
    let text = if a.stream {
        gen_stream(&spec, k, m)?.stream.to_text()
    } else {
        format_dataset(&Dataset {
            metric: MetricSpace::euclidean(spec.d),
            points: gen_dataset(&spec, k, m)?,
        })?
    };
    write_or_print(out, a.out.as_ref(), &text)?;
    Ok(EXIT_OK)
}

fn run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    a.dataset.apply(&mut cfg.dataset.spec);
    let al = &mut cfg.algorithm;
    if a.data.is_some() {
        cfg.dataset.path = a.data.clone();
    }
    if let Some(v) = a.reduction {
        al.reduction = v;
    }
    if let Some(v) = &a.builder {
        al.builder = v.clone();
    }
    if a.samples.is_some() {
        al.samples = a.samples;
    }
    if let Some(v) = a.eps {
        al.eps = v;
    }
    if let Some(v) = &a.k {
        al.k = OneOrMany::Many(v.clone());
    }
    if let Some(v) = a.z {
        al.z = v;
    }
    if let Some(v) = &a.m {
        al.m = OneOrMany::Many(v.clone());
    }
    if let Some(v) = a.delta {
        al.delta = v;
    }
    if let Some(v) = a.trials {
        al.trials = v;
    }
    if a.c_sigma.is_some() {
        al.c_sigma = a.c_sigma;
    }
    if let Some(v) = a.pool_grid {
        cfg.verification.pool_grid = v;
    }
    if a.no_verify {
        cfg.verification.enabled = false;
    }
    if let Some(f) = &a.format {
        cfg.output.format = match f.as_str() {
            "csv" => ReportFormat::Csv,
            "text" => ReportFormat::Text,
            other => return Err(Error::Parameter(format!("unknown format '{other}'"))),
        };
    }
    if a.out.is_some() {
        cfg.output.path = a.out.clone();
    }
    let rows = run_experiment(&cfg, a.seed)?;
    if let Some(text) = emit_report(&rows, cfg.output.format, cfg.output.path.as_deref())? {
        out.write_all(text.as_bytes())?;
    }
    let failed = rows.iter().filter(|r| !r.failure.is_empty()).count();
    let rejected = rows.iter().filter(|r| r.pass == Some(false)).count();
    writeln!(err, "{} rows, {failed} pipeline failures, {rejected} verification failures", rows.len())?;
    Ok(if failed > 0 {
        EXIT_PIPELINE
    } else if rejected > 0 {
        EXIT_VERIFY
    } else {
        EXIT_OK
    })
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let data = read_dataset(&a.data)?;
    let coreset = read_dataset(&a.coreset)?;
    let mut spec = CheckSpec::new(a.k, a.z, a.m, a.eps).with_eta(a.eta);
    if a.exhaustive_h {
        spec = spec.exhaustive();
    } else if let Some(h) = a.h_grid {
        spec.h = HGrid::Values(h);
    }
    let pool = default_pool(&data.metric, &data.points, a.pool_grid);
    let report = check_coreset(&data.metric, &data.points, &coreset.points, &spec, &pool)?;
    out.write_all(report.to_record().as_bytes())?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn stream_run(a: StreamRunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let stream = Stream::parse(&std::fs::read_to_string(&a.stream)?)?;
    let mut cfg = StreamConfig::new(a.k, a.z, a.m, a.eps, a.delta).with_seed(a.seed).with_vanilla(VanillaStreamSpec {
        builder: a.builder.clone(),
        samples: a.samples,
        ..VanillaStreamSpec::default()
    });
    if let Some(c) = a.c_sigma {
        cfg.c_sigma = c;
    }
    cfg.vanilla.builder()?;
    let result = match a.reduction.as_str() {
        "one" => stream_reduction_one(&stream, &cfg),
        "two" => stream_reduction_two(&stream, &cfg),
        other => return Err(Error::Parameter(format!("unknown reduction '{other}'"))),
    };
    let res = match result {
        Ok(r) => r,
        Err(e) if usage(&e) => return Err(e),
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_PIPELINE);
        }
    };
    let r = &res.report;
    writeln!(
        err,
        "{}: {} updates, {} guesses tried, chosen {:?}, exact {}, |G| {}, |X_S| {}, dense coreset {}, output {} points",
        r.pipeline,
        r.updates,
        r.guesses.len(),
        r.chosen,
        r.exact,
        r.isolated_size,
        r.sparse_size,
        r.dense_coreset_size,
        res.coreset.weighted.len()
    )?;
    let ds = Dataset {
        metric: MetricSpace::euclidean(stream.d),
        points: res.coreset.weighted.clone(),
    };
    write_or_print(out, a.out.as_ref(), &format_dataset(&ds)?)?;
    if a.verify {
        let x = stream.final_multiset()?;
        let metric = MetricSpace::euclidean(stream.d);
        let pool = default_pool(&metric, &x, a.pool_grid);
        let rep = check_coreset(&metric, &x, &res.coreset.weighted, &CheckSpec::new(a.k, a.z, a.m as f64, a.eps), &pool)?;
        err.write_all(rep.to_record().as_bytes())?;
        if !rep.pass {
            return Ok(EXIT_VERIFY);
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.cmd {
        Command::Gen(a) => gen(a, out),
        Command::Run(a) => run(a, out, err),
        Command::Check(a) => check(a, out),
        Command::StreamRun(a) => stream_run(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_PIPELINE
            }
        }
    }
}
