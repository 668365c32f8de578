use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (smallest singular value {sigma_min:e}, largest {sigma_max:e})")]
    SingularMatrix { sigma_min: f64, sigma_max: f64 },

    #[error("block dimensions disagree: {0}")]
    DimensionMismatch(String),

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shift is not a multiple of the grid step: {0}")]
    OffGridShift(String),

    #[error("invalid exponent {0} (must lie in [1, inf])")]
    InvalidExponent(f64),

    #[error("domain tag mismatch: {0}")]
    DomainTagMismatch(String),

    #[error("matrix is not right-regular (A12 or A22 singular)")]
    NotRightRegular,

    #[error("matrix is not of Cohen type")]
    NotCohenType,

    #[error("field is not tagged with a Cohen-type matrix")]
    NotCohenTagged,

    #[error("window pair is orthogonal: <g, gamma> = 0")]
    OrthogonalWindowPair,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
