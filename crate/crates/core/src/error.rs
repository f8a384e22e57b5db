use thiserror::Error;

/// Errors raised by the numerical kernels and pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated an operation's documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative method failed to converge or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A construction would exceed the configured dimension cap.
    #[error("resource limit: dimension {needed} exceeds cap {cap}")]
    Resource { needed: usize, cap: usize },

    /// A dissipative trajectory did not cross its threshold in the allotted steps.
    #[error("no convergence after {steps} steps (final gap {final_gap:.3e})")]
    NonConvergence { steps: usize, final_gap: f64 },

    /// A closed-form bound was requested outside the regime where it holds.
    #[error("outside the valid regime (boundary value {boundary:.6e})")]
    OutOfRegime { boundary: f64 },

    /// The continuous-time integrator drifted away from the state manifold.
    #[error("integration failure: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Contract(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
