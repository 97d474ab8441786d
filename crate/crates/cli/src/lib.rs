//! Experiment configuration, sweep execution and offline analysis for qdforge.

pub mod analyze;
pub mod config;
pub mod sweep;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentSpec};
pub use sweep::{run_sweep, SweepOptions, SweepSummary};
