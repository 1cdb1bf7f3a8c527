use thiserror::Error;

/// Errors raised by the smoothing toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The unridged local linear denominator vanished at `x`.
    #[error("singular design at x = {x}: no stable local linear fit")]
    SingularDesign { x: f64 },

    /// No observation carries positive kernel weight at `x`.
    #[error("empty kernel window at x = {x}")]
    EmptyWindow { x: f64 },

    /// m''(x) = 0 makes the AMSE-optimal bandwidth unbounded.
    #[error("degenerate curvature: m''(x) = 0, optimal bandwidth is unbounded")]
    DegenerateCurvature,

    /// The bracket in the denominator of a coverage-accuracy ratio is (close to) zero.
    #[error("singular coverage ratio: denominator bracket {0:e}")]
    SingularRatio(f64),

    /// A variance factor that theory guarantees to be positive was not.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// Invalid configuration (unknown keys, out of range values, missing baseline).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
