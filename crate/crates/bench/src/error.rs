use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable inputs; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A verification check failed; exit status 1.
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
    #[error(transparent)]
    Lib(#[from] asymblis::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Lib(_) => 2,
        }
    }
}
