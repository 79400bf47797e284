use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::generate::DatasetSpec;
use crate::error::{Error, Result};

/// A scalar or a list, so sweeps can be written `k = [1, 2, 4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// The vanilla builder alone, ignoring outliers.
    Vanilla,
    One,
    Two,
    StreamOne,
    StreamTwo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vanilla => "vanilla",
            Method::One => "one",
            Method::Two => "two",
            Method::StreamOne => "stream-one",
            Method::StreamTwo => "stream-two",
        }
    }

    pub fn is_stream(self) -> bool {
        matches!(self, Method::StreamOne | Method::StreamTwo)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "vanilla" => Method::Vanilla,
            "one" => Method::One,
            "two" => Method::Two,
            "stream-one" => Method::StreamOne,
            "stream-two" => Method::StreamTwo,
            other => return Err(Error::Parameter(format!("unknown reduction '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Dataset or stream file; generated from the fields below when absent.
    pub path: Option<PathBuf>,
    #[serde(flatten)]
    pub spec: DatasetSpec,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            path: None,
            spec: DatasetSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub reduction: Method,
    /// `identity` or `sensitivity`.
    pub builder: String,
    /// Fixed sample count for the sensitivity builder.
    pub samples: Option<usize>,
    pub eps: f64,
    pub k: OneOrMany<usize>,
    pub z: u32,
    pub m: OneOrMany<usize>,
    /// Failure probability of the streaming sketches.
    pub delta: f64,
    /// Independent runs per `(k, m)`; run `i` uses dataset seed `seed + i` and algorithm seed `root + i`.
    pub trials: usize,
    /// Vanilla stream for the streaming pipelines: `buffered` or `merge-reduce`.
    pub vanilla_stream: String,
    pub block: usize,
    pub c_sigma: Option<f64>,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            reduction: Method::One,
            builder: "sensitivity".into(),
            samples: None,
            eps: 0.2,
            k: OneOrMany::One(2),
            z: 1,
            m: OneOrMany::One(2),
            delta: 0.05,
            trials: 1,
            vanilla_stream: "buffered".into(),
            block: 64,
            c_sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerificationConfig {
    pub enabled: bool,
    /// Candidate pool: data support plus a `pool_grid^d` grid over the bounding box.
    pub pool_grid: usize,
    /// Outlier budgets to check; `{0, ..., m, m/2}` when absent.
    pub h_grid: Option<Vec<f64>>,
    /// Check every real budget in `[0, m]` instead of a grid.
    pub exhaustive_h: bool,
    pub eta: f64,
    /// Maximum number of center subsets to enumerate.
    pub budget: u64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            enabled: true,
            pool_grid: 8,
            h_grid: None,
            exhaustive_h: false,
            eta: 0.0,
            budget: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: ReportFormat,
    /// Report file; stdout when absent.
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: ReportFormat::Csv,
            path: None,
        }
    }
}

/// Everything needed to reproduce a batch of experiment rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub algorithm: AlgorithmConfig,
    pub verification: VerificationConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        Ok(cfg)
    }

    /// Reads a config; a relative dataset path is resolved against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        if let (Some(p), Some(dir)) = (&cfg.dataset.path, path.parent()) {
            if p.is_relative() {
                cfg.dataset.path = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.algorithm;
        if let Some(p) = &self.dataset.path {
            if !p.exists() {
                return Err(Error::Io(format!("dataset file {} does not exist", p.display())));
            }
        } else {
            self.dataset.spec.validate()?;
        }
        if !(a.eps > 0.0 && a.eps < 1.0) || !(a.delta > 0.0 && a.delta < 1.0) {
            return Err(Error::Parameter("eps and delta must lie in (0, 1)".into()));
        }
        if a.z == 0 || a.trials == 0 || a.k.values().is_empty() || a.k.values().contains(&0) || a.m.values().is_empty() {
            return Err(Error::Parameter("need z >= 1, trials >= 1 and nonempty k >= 1 and m lists".into()));
        }
        if !matches!(a.builder.as_str(), "identity" | "sensitivity") {
            return Err(Error::Parameter(format!("unknown builder '{}'", a.builder)));
        }
        if !matches!(a.vanilla_stream.as_str(), "buffered" | "merge-reduce") || a.block == 0 {
            return Err(Error::Parameter("vanilla_stream must be buffered or merge-reduce with block >= 1".into()));
        }
        if self.verification.pool_grid > 64 {
            return Err(Error::Parameter("pool_grid must be at most 64".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_sweeps() {
        let cfg = ExperimentConfig::parse(
            r#"
            [dataset]
            n = 40
            outliers = 3
            seed = 7

            [algorithm]
            reduction = "stream-one"
            builder = "identity"
            k = [1, 2, 4]
            m = 2
            eps = 0.3

            [verification]
            h_grid = [0, 1, 2]

            [output]
            format = "text"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.dataset.spec.n, 40);
        assert_eq!(cfg.dataset.spec.d, 2);
        assert_eq!(cfg.algorithm.reduction, Method::StreamOne);
        assert_eq!(cfg.algorithm.k.values(), vec![1, 2, 4]);
        assert_eq!(cfg.algorithm.m.values(), vec![2]);
        assert_eq!(cfg.verification.h_grid, Some(vec![0.0, 1.0, 2.0]));
        assert_eq!(cfg.output.format, ReportFormat::Text);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_with_a_line() {
        let err = ExperimentConfig::parse("[algorithm]\neps = 0.2\nepsilon = 0.1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(ExperimentConfig::parse("[dataset]\nsize = 3\n").is_err());
    }

    #[test]
    fn missing_dataset_file_fails_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.dataset.path = Some("/nonexistent/points.txt".into());
        assert!(matches!(cfg.validate(), Err(Error::Io(_))));
    }
}
