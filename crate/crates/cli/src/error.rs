use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("certificate failed: {0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] orthlab_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for a failed certificate, 2 for usage and parameter errors, 3 for data and resources.
    pub fn exit_code(&self) -> i32 {
        use orthlab_core::Error as E;
        match self {
            CliError::Failed(_) | CliError::Core(E::Integrity(_)) => 1,
            CliError::Usage(_) | CliError::Core(E::Domain(_)) => 2,
            CliError::Data(_) | CliError::Io(_) | CliError::Core(_) => 3,
        }
    }
}
