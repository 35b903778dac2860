use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Singular(String),

    #[error("{0} identity check(s) failed")]
    Failed(usize),

    #[error(transparent)]
    Library(#[from] hyperinv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Singular(_) | CliError::Library(hyperinv::Error::Singular { .. }) => 3,
            CliError::Library(hyperinv::Error::AllSamplesDegenerate) => 1,
            CliError::Input(_) | CliError::Library(_) => 2,
        }
    }
}
