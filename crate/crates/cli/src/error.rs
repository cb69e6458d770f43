use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad arguments: {0}")]
    Args(String),

    #[error(transparent)]
    Model(#[from] xyphase::Error),

    /// An emitted value broke a range invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle check failed: {0}")]
    OracleFailed(String),

    #[error("config file: {0}")]
    Config(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 oracle or invariant failure, 2 bad arguments.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) | CliError::Model(_) | CliError::Config(_) => 2,
            CliError::Invariant(_) | CliError::OracleFailed(_) | CliError::Csv(_) | CliError::Io(_) => 1,
        }
    }
}
