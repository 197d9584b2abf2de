//! Benchmark harness for the smoothed sliced divergences in [`gssd`].
//!
//! Every experiment produces long-format [`ResultRow`]s (one per grid point
//! and run) written as CSV behind a `#` header that echoes the full
//! [`ExperimentConfig`]. Rows come out in grid order whatever the thread
//! count, and all value columns are a function of the config alone.

mod config;
mod experiments;
mod io;
mod stats;

use thiserror::Error;

pub use config::{Command, ExperimentConfig};
pub use experiments::{
    bound_curve, run, run_displacement, run_noise_sweep, run_projection_complexity, run_sample_complexity,
    ResultRow,
};
pub use io::{compare, compare_sets, parse_matrix, read_matrix, read_rows, write_csv, CompareReport};
pub use stats::fit_loglog_slope;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] gssd::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: row {row}, column {col}: {reason}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
