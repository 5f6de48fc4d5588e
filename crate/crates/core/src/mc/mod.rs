//! Monte Carlo harness: repeated simulation and estimation with per-level
//! mean squared errors against the true parameters.
//!
//! Outputs are `replications.csv` (one row per replication and level),
//! `mse_table.csv` (one row per level) and `summary.json`.

mod config;
mod experiment;
mod summary;

pub use config::{Backend, ExperimentConfig};
pub use experiment::{
    run_experiment, FailedReplication, LevelOutcome, MseRow, MseTable, Replication, Targets, MAX_FAILURE_FRACTION,
};
pub use summary::{summarize, write_mse_csv, write_outputs, write_replications_csv, Report, Summary, MSE_COLUMNS};
