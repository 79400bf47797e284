use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("empty point set")]
    EmptySet,

    #[error("weighted set is not a subset: {0}")]
    NotASubset(String),

    #[error("empty center set")]
    EmptyCenters,

    #[error("infeasible outlier budget: h={h} exceeds total weight {total}")]
    Infeasible { h: f64, total: f64 },

    #[error("enumeration budget exceeded: {required} subsets required, budget is {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("weight calibration impossible: part {part} has size {size} but no coreset mass")]
    Calibration { part: usize, size: f64 },

    #[error("grid index overflow: {0}")]
    Overflow(String),

    #[error("stream error: {0}")]
    Stream(String),

    #[error("pipeline failure: {0}")]
    Pipeline(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
