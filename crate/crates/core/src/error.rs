use thiserror::Error;

/// Errors raised by the numerical kernel, the distribution and the fitting code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration exhausted its term/iteration cap.
    #[error("{what} did not converge within {limit} terms")]
    Convergence { what: &'static str, limit: usize },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: value {value:e}, estimated error {abs_err:e}")]
    Quadrature { value: f64, abs_err: f64 },

    /// The signed four-term density bracket evaluated to a non-positive number.
    #[error("density bracket is not positive at z = {z}: {value:e}")]
    NonPositiveDensity { z: f64, value: f64 },

    /// A log-likelihood term failed; carries the offending observation index.
    #[error("observation {index}: {source}")]
    Observation {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Invalid parameters or degenerate input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Rejects NaN and infinities.
pub(crate) fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}
