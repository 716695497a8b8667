use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum TwdError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("simplex {0:?} cannot be lifted: vertex spread reaches half the torus")]
    Lift(Vec<usize>),

    #[error("did not terminate within {0} rounds")]
    NonTermination(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, TwdError>;

impl TwdError {
    /// Process exit code for the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            TwdError::Infeasible(_) => 2,
            TwdError::NonTermination(_) => 3,
            TwdError::Io(_) | TwdError::Format(_) => 4,
            _ => 1,
        }
    }
}
