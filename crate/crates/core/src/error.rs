use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of the operation (non-finite values,
    /// envelopes without a transform, unsupported argument types).
    #[error("domain error: {0}")]
    Domain(String),

    /// A named parameter failed validation.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The evaluation point hits a pole of the analytic form.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The integrand does not decay and no regularization was supplied.
    #[error("integral does not converge: {0}")]
    NonConvergent(String),

    /// Quadrature or extrapolation ran out of budget before reaching the
    /// requested tolerance. Carries the best estimate and its bound.
    #[error("accuracy target missed: estimate {estimate_re:+.6e}{estimate_im:+.6e}i, bound {bound:.3e} ({detail})")]
    Accuracy {
        estimate_re: f64,
        estimate_im: f64,
        bound: f64,
        detail: String,
    },

    /// Two slices or a slice and an operation disagree on the grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A dense construction would exceed the allowed size.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
