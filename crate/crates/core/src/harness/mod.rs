//! Experiment configuration, batch execution, statistics and report files.

mod checkpoints;
mod config;
mod experiment;
mod poses;
mod report;
pub mod stats;

pub use checkpoints::{evaluate_checkpoints, evaluate_policy, CheckpointCurve, CurvePoint};
pub use config::{resolve_map, EvalConfig, ExperimentConfig, SEED_ENV};
pub use experiment::{block_seed, report_systems, run_experiment, run_policy};
pub use poses::sample_start_poses;
pub use report::{
    AccuracyCell, ExperimentReport, PooledAccuracy, ReportFormat, TimeCell, ACCURACY_HEADER, TIME_HEADER,
};
