//! Dataset and stream generators, the experiment runner and report emission.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod report;

pub use config::{AlgorithmConfig, DatasetConfig, ExperimentConfig, Method, OneOrMany, OutputConfig, ReportFormat, VerificationConfig};
pub use experiment::{load_input, run_experiment, run_one, Input, Row};
pub use generate::{gen_dataset, gen_stream, DatasetSpec, StreamTrace};
pub use report::{emit_report, format_report, parse_csv_report};
