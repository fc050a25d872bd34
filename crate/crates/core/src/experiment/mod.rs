//! Configuration files, parameter sweeps and their CSV, plot and manifest
//! outputs.

pub mod config;
pub mod output;
pub mod plot;
pub mod reproduce;
pub mod sweep;
pub mod validate;

pub use config::{parse_config, parse_config_str, ConfigError, ConfigIssue, ExperimentConfig};
pub use output::{emit_outputs, read_csv, write_csv, RunManifest};
pub use reproduce::{reproduce, run_configs, Figure, Overrides, RunOutcome};
pub use sweep::{run_sweep, ModelTemplate, RangeRule, ResultRow, Source, SweepSpec, SweepVariable};
pub use sweep::{run_sweep_with, RowSources};
pub use validate::{run_validation, CheckOutcome};
