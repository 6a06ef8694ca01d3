//! Command-line front end for `mpsig-core`.
//!
//! The binary is a thin wrapper around [`app::run`]; the pipeline, the
//! stability experiment and the benchmark are exposed here so tests can
//! drive them without spawning processes.

pub mod app;
pub mod bench;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod stability;

pub use app::run;
pub use config::PipelineConfig;
pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, Manifest};
pub use stability::{stability_experiment, StabilityOptions, StabilityRow};
