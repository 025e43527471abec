//! Library error type.

use thiserror::Error;

/// Errors raised by construction, evaluation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("parameter guard: {0}")]
    ParameterGuard(String),
    #[error("singular minor (condition estimate {0:e})")]
    SingularMinor(f64),
    #[error("grid is not symmetric about x = 0")]
    GridNotSymmetric,
    #[error("every stencil on the grid is masked")]
    AllMasked,
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("wrong parameter branch: {0}")]
    WrongBranch(String),
    #[error("no closed form for family {0}")]
    NoClosedForm(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("unknown parameter `{0}` for family {1}")]
    UnknownParameter(String, String),
}

pub type Result<T> = std::result::Result<T, Error>;
