use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data format error: {0}")]
    Data(String),

    #[error("numerical failure: {0}")]
    Numerical(rydladder::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Data(_) | CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<rydladder::Error> for CliError {
    fn from(e: rydladder::Error) -> Self {
        use rydladder::Error as E;
        match e {
            E::Domain(_) | E::Partition(_) | E::Schedule(_) | E::DimensionMismatch { .. } => {
                CliError::Config(e.to_string())
            }
            E::EmptyDistribution | E::InsufficientData(_) => CliError::Data(e.to_string()),
            E::EigenNoConvergence { .. }
            | E::DegenerateGroundState { .. }
            | E::LinearNoConvergence { .. }
            | E::FitFailed(_)
            | E::NoHalfCrossing => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
