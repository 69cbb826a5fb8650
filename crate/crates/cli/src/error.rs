use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] largespin::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {reason}", path.display())]
    Malformed { path: PathBuf, reason: String },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 1 for invalid input, 2 for numerical failure, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        use largespin::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Model(e) => match e {
                E::NonFinite { .. }
                | E::QuadratureNoConvergence { .. }
                | E::DegenerateEquilibrium
                | E::NoCrossing { .. }
                | E::TooFewNodes { .. } => 2,
                _ => 1,
            },
            CliError::Io { .. } | CliError::Csv { .. } | CliError::Malformed { .. } => 3,
        }
    }
}
