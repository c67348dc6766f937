use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure cannot be normalized at working precision: {0}")]
    NotNormalizable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("conditioning point is degenerate for the kernel split (M(x) = 1 or x in the zero set)")]
    DegenerateConditioning,

    #[error("copula is not absolutely continuous; no full-dimensional density exists")]
    NotAbsolutelyContinuous,

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error} (requested {requested})")]
    Quadrature {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("finite differences did not settle across the step schedule (spread {spread})")]
    FdNonConvergence { spread: f64 },

    #[error("spec parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn measure(msg: impl Into<String>) -> Self {
        Error::InvalidMeasure(msg.into())
    }
}
