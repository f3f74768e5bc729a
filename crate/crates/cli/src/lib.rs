//! Configuration, command implementations and artifact writing for `lpg`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::{CliError, Result};
pub use output::{write_outputs, Manifest, RunOutput};
