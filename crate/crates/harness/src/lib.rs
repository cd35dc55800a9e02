//! Experiment harness for the SARA reconstruction toolkit: image and mask
//! files, configuration, and the benchmark protocols behind the `sara` CLI.

use std::path::{Path, PathBuf};

pub mod assets;
pub mod config;
pub mod experiment;
pub mod mask_io;
pub mod pgm;

pub use experiment::{
    run_experiment, run_radio_demo, write_results_csv, Algorithm, ExperimentSpec, OperatorSpec,
    ResultRow,
};
pub use sara_core::metrics::snr_db;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sara_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_owned(),
            source,
        }
    }
}
