//! Experiment harness around the `resolvability` crate: instance files, the
//! random-coding baseline, and CSV parameter sweeps.

pub mod baseline;
pub mod instance;
pub mod sweep;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] resolvability::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {msg}")]
    Parse { origin: String, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("bound violated in {mode} at {axis} = {value}: measured {tv} > bound {bound}")]
    BoundViolation {
        mode: String,
        axis: String,
        value: f64,
        tv: f64,
        bound: f64,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
