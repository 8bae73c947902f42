use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Library(#[from] pcf_calculus::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for a failed check, 2 for anything the user has to fix in the invocation.
    pub fn exit_code(&self) -> u8 {
        use pcf_calculus::Error as E;
        match self {
            CliError::Verification(_) => 1,
            CliError::Library(E::Config(_) | E::Parse(_) | E::Descriptor(_) | E::Domain(_)) => 2,
            CliError::Library(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}
