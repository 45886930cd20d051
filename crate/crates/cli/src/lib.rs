//! Configuration ingestion, run orchestration and output files for `zhs`.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod report;
pub mod run;

pub use config::{Mode, RunConfig};
pub use output::{parse_trajectory, LoadedTrajectory};
pub use run::{execute, Outcome, Status};

/// Failure to run at all (exit status 1).
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("trajectory input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] zhs_core::Error),
}

impl RunError {
    /// Short category used in the diagnostic line.
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Io { .. } => "io",
            RunError::Input(_) => "input",
            RunError::Core(_) => "runtime",
        }
    }
}
