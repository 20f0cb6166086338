use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HawkesError {
    /// A parameter lies outside the domain of the function or model.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result does not fit in an `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A series or iteration did not meet its tolerance within its budget.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// The grid scheme is undefined because `k_0^n >= 1`.
    #[error(
        "scheme is ill-posed on this grid: k_0 = {k0} >= 1 with n = {steps}; \
         use at least n = {min_steps} steps"
    )]
    WellPosedness {
        k0: f64,
        steps: usize,
        min_steps: usize,
    },

    /// The requested operation has no implementation for this kernel or baseline.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Inconsistent configuration (wrong kernel family for a variant, bad sizes, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A statistic was requested on an empty sample.
    #[error("empty sample")]
    EmptySample,

    /// Event times are not strictly increasing.
    #[error("event times are not strictly increasing at index {0}")]
    Unsorted(usize),
}

pub type Result<T> = std::result::Result<T, HawkesError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HawkesError::Domain(msg.into()))
}
