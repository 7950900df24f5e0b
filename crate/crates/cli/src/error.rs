use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad arguments: {0}")]
    Args(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] quasilattice::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for bad arguments or parameters, 3 for I/O, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use quasilattice::Error as E;
        match self {
            CliError::Args(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Model(e) => match e {
                E::InvalidParameter { .. }
                | E::EmptySector { .. }
                | E::StepSize { .. }
                | E::Recurrence { .. }
                | E::DimensionGuard { .. }
                | E::Truncation { .. }
                | E::InfinitePeriod => 2,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
