use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("resolvent undefined at lambda = {lambda}: lambda does not exceed the spectral bound")]
    ResolventUndefined { lambda: f64 },

    /// Raised by operations that need a strictly negative spectral bound.
    /// `shift` is the suggested ω for the caller-side rescaling `A - ωI`.
    #[error("spectral bound {spectral_bound} is not negative; rescale the generator as A - {shift}·I first")]
    NeedsRescaling { spectral_bound: f64, shift: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("spike width {requested} is below grid resolution; minimal admissible width is {minimal}")]
    Resolution { requested: f64, minimal: f64 },

    #[error("net samples are not order bounded: {0}")]
    OrderUnbounded(String),

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
