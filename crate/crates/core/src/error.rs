use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The integrand produced NaN or an infinity.
    #[error("integrand is not finite at r = {abscissa} (value {value})")]
    NonFiniteIntegrand { abscissa: f64, value: f64 },

    /// No finite tail bound exists for the requested envelope.
    #[error("tail of the integrand cannot be bounded: {0}")]
    UnboundedTail(String),

    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate}, {panels} panels")]
    NotConverged {
        value: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("initial data family `{0}` has no closed-form transform")]
    UnsupportedFamily(String),

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("degenerate fit window: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` wrapper so that [`Error`] stays `Clone + PartialEq`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("i/o error: {0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain { name, value, reason }
}
