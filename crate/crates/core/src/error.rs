use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the routine is defined.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// The result is not representable (overflow).
    #[error("range error: {0}")]
    Range(&'static str),
    /// The input is a singular point of the function or the system is singular.
    #[error("singular input: {0}")]
    Singular(&'static str),
    /// An iterative method did not converge.
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },
    /// Inconsistent sizes or parameters.
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
