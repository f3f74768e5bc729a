use std::path::PathBuf;

use lpg_core::LpgError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] LpgError),
    #[error("cannot read config {path}: {source}")]
    MissingConfig { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {msg}")]
    Parse { origin: String, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("unknown key `{key}` ({origin})")]
    UnknownKey { key: String, origin: String },
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::MissingConfig { .. } => "E_CONFIG_MISSING",
            CliError::Parse { .. } => "E_CONFIG_PARSE",
            CliError::Invalid { .. } | CliError::UnknownKey { .. } => "E_CONFIG",
            CliError::Usage(_) => "E_USAGE",
            CliError::Io { .. } => "E_IO",
            CliError::Csv(_) | CliError::Json(_) => "E_OUTPUT",
        }
    }

    /// `CODE: message` on one line.
    pub fn one_line(&self) -> String {
        format!("{}: {}", self.code(), self.to_string().replace('\n', " "))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
