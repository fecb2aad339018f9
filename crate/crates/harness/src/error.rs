use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] confounded_ridge::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("failed checks: {0}")]
    ChecksFailed(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for unusable input (config or model), 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        use confounded_ridge::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Model(E::Io(_) | E::RootFinding(_) | E::Csv(_)) => 1,
            HarnessError::Model(_) => 2,
            HarnessError::Io { .. } | HarnessError::ChecksFailed(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
