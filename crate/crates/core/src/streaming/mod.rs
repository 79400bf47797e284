//! Dynamic-stream coresets over the grid `[1, delta]^d`.
//!
//! The sketches here (sparse recovery, two-level sampling, isolated-point
//! extraction, light-bucket recovery) are linear, so deletions are handled by
//! feeding negative updates, including replaying points recovered after the
//! stream ends.

pub mod hash;
pub mod isolated;
pub mod light;
pub mod pipeline;
pub mod recovery;
pub mod sampler;
pub mod stream;
pub mod vanilla_stream;

pub use isolated::{extract_isolated, sample_count, IsolatedExtractor};
pub use light::{light_parts_offline, LightOutcome, LightParams, LightPart, LightSketch};
pub use pipeline::{stream_reduction_one, stream_reduction_two, GuessOutcome, GuessReport, StreamConfig, StreamOutput, StreamReport};
pub use recovery::SparseRecovery;
pub use sampler::TwoLevelSampler;
pub use stream::{Stream, StreamUpdate};
pub use vanilla_stream::{VanillaStream, VanillaStreamKind, VanillaStreamSpec};
