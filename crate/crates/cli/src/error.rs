use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(#[from] pressure_lab::Error),
    #[error("solver failure: {0}")]
    Runs(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 validation, 2 solver or i/o failure, 3 failed invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) | CliError::Runs(_) | CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn at(path: &str) -> impl Fn(pressure_lab::Error) -> CliError + '_ {
    move |e| CliError::Validation(format!("{path}: {e}"))
}
