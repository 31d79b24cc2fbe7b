use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid is too coarse for the integrand or packet it has to carry.
    #[error(
        "resolution error on {axis} axis: {detail} (have {given} points, need at least {required})"
    )]
    Resolution {
        axis: &'static str,
        given: usize,
        required: usize,
        detail: String,
    },

    /// A kernel was asked for at zero evolution parameter.
    #[error("singular kernel: evolution parameter {parameter} is zero; identity handling belongs to the caller")]
    SingularKernel { parameter: &'static str },

    /// Fringe extraction found fewer than two peaks.
    #[error("no fringes: found {found} peak(s) above threshold in the central window")]
    NoFringes { found: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
