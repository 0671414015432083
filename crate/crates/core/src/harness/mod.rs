//! Experiment orchestration, configuration, reports and the command line.

mod cli;
mod config;
mod experiments;

pub use cli::cli_main;
pub use config::{table1_noise_rows, ExperimentConfig, Method, DEFAULT_RATIOS, DEFAULT_TABLE1_POINTS, DEFAULT_TRIALS};
pub use experiments::{
    denoise_config, experiment_cloud, hpf_edge_trial, run_msecurve, run_table1, run_table1_observed, CurveChecks, CurvePoint,
    EdgeConcentration, ExperimentReport, RowOrdering, TableCell, REPORT_SCHEMA_VERSION,
};
