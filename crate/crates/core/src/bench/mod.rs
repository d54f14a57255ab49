//! Experiment harness: configuration, paired sweeps, and summaries.

pub mod config;
pub mod stats;
pub mod sweep;

pub use config::{parse_algorithms, parse_kv, ExperimentConfig};
pub use stats::{summarize, Summary};
pub use sweep::{
    read_csv, run_sweep, run_sweep_with, trial_seed, Execution, SweepOutput, SweepParam, SweepRow,
    SweepSpec,
};
