//! Coresets for k-median / k-means with outliers.
//!
//! Robust coresets are built by black-box reduction to ordinary ("vanilla")
//! coreset builders, either offline or over a dynamic stream of insertions and
//! deletions on a grid. Every guarantee can be verified at small scale with the
//! exhaustive checker in [`objective`].

pub mod approx;
pub mod bench;
pub mod cli;
pub mod duplication;
pub mod error;
pub mod io;
pub mod metric;
pub mod objective;
pub mod partition;
pub mod reduction;
pub mod streaming;
pub mod vanilla;

pub use error::{Error, Result};
pub use metric::{DupMode, MetricSpace, Point, WeightedPointSet};
pub use objective::{CenterSet, CheckSpec, CoresetCheckReport};
