//! Config-driven experiment runner for the minwise hashing schemes in `coph-core`.

pub mod config;
pub mod plot;
pub mod runner;

pub use config::{ConfigError, DataSource, ExperimentConfig};
pub use runner::{run_experiment, ExperimentOutput};
