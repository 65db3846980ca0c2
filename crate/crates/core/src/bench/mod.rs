//! Benchmark harness: experiment configs, the replication runner and result
//! tables.

mod config;
mod presets;
mod results;
mod run;

use thiserror::Error;

pub use config::{DataConfig, Design, ExperimentConfig, GammaStart, Method, PenalizedConfig, Protocol, SubsetConfig};
pub use presets::{preset, presets, Preset};
pub use results::{
    aggregate, emit_plot_data, read_rows, read_rows_from, write_aggregates, write_rows, AggregateRow, PlotKind,
    ResultRow, Summary,
};
pub use run::{
    fit_method, make_splits, replication_seed, run_experiment, write_outputs, CellFailure, MethodFit, RunOutput, Splits,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data generation failed: {0}")]
    Data(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("no result rows")]
    EmptyInput,
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Io(e.to_string())
    }
}
