//! File formats, run orchestration and the `hyperturb` command line on top
//! of [`hyperturb_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::{execute, load_config, sweep_study, Outcome, SweepStudy};
pub use config::{parse_config, ConfigError, InitKind, Mode, RunConfig};
pub use error::CliError;
