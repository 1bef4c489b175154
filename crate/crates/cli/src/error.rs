use std::path::{Path, PathBuf};

use photon_stats::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments.
    #[error("{0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A core failure while handling a particular file.
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: CoreError },

    #[error("{0}")]
    AllFitsFailed(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn core_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Domain(_) | CoreError::InvalidModel(_) | CoreError::Geometry(_) => 2,
        CoreError::Malformed { .. } | CoreError::Io(_) | CoreError::Csv(_) => 3,
        CoreError::Fit(_) | CoreError::NoZpl(_) => 4,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io { .. } => 3,
            CliError::InFile { source, .. } | CliError::Core(source) => core_code(source),
            CliError::AllFitsFailed(_) => 4,
        }
    }
}

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn in_file(path: &Path) -> impl FnOnce(CoreError) -> CliError + '_ {
    move |source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    }
}

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Validation(msg.into()))
}
