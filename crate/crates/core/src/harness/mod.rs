//! Monte Carlo experiments over `(n, p, σ²)` grids, theoretical benchmark
//! rates, and CSV/JSONL persistence.

mod bench;
mod config;
mod emit;
mod record;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use bench::{theoretical_benchmarks, Benchmarks};
pub use config::{Estimator, ExperimentConfig, GridPoint, Model, OutputFormat, OutputSpec, Tolerances};
pub use emit::{emit, read_csv, read_jsonl, write_csv, write_jsonl, CSV_HEADER};
pub use record::ExperimentRecord;
pub use run::{replicate_seed, rounding_seed, run_experiment, run_replicate, summarize, Summary};

use crate::error::SyncError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] SyncError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl HarnessError {
    /// 1 for configuration or validation problems, 2 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Model(_) => 1,
            HarnessError::Io { .. } | HarnessError::Parse { .. } => 2,
        }
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;
