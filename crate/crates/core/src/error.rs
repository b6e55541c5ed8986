use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is evaluated at a point where the quantity diverges.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A precondition of the operation is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A model or input failed validation.
    #[error("validation failed: {0}")]
    Validation(String),

    /// The requested configuration is not supported by this implementation.
    #[error("unsupported: {0}")]
    Capability(String),

    /// Special-function parameters hit a pole or a degenerate connection formula.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numeric failure in {what}: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Numeric {
        what: String,
        achieved: f64,
        requested: f64,
    },

    /// Malformed textual input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn numeric(what: impl Into<String>, achieved: f64, requested: f64) -> Self {
        Error::Numeric {
            what: what.into(),
            achieved,
            requested,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
