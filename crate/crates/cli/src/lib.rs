//! Experiment harness: TOML configs in, run directories out.
//!
//! A run directory holds the subcommand's CSV tables, a `reports.jsonl`
//! stream and `manifest.json` (config hash, schema versions, status,
//! wall time). Exit codes: 0 ok, 1 runtime failure, 2 usage or config
//! error, 3 lemma violation.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use cli::{Cli, Command};
pub use config::RunConfig;
pub use error::{exit, CliError, ConfigError};
pub use run::run;
