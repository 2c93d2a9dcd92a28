//! Scenario runner and acceptance suite for `qsl-core`.

pub mod check;
pub mod config;
pub mod error;
pub mod runner;

pub use config::{parse_config, Scenario, ScenarioConfig, ScenarioKind};
pub use error::{CliError, CliResult};
pub use runner::{run, RunReport};
