use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dshp::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl HarnessError {
    /// Process exit code: 2 for malformed input, 3 for bad configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Format { .. } => 2,
            HarnessError::Config(_) => 3,
            HarnessError::Core(dshp::Error::Config(_)) => 3,
            _ => 1,
        }
    }
}
