use thiserror::Error;

/// Errors produced by the core checkers, solvers and iteration engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A point is outside a map's domain or covered by no branch.
    #[error("point {x} is outside the domain (no covering branch)")]
    Domain { x: f64 },

    /// ψ is only defined on the nonnegative reals.
    #[error("psi argument {t} is negative")]
    NegativeArgument { t: f64 },

    /// No branch of the map yields a preimage of `y` within `tol`.
    #[error("map `{map}` has no preimage of {y} within {tol}")]
    NoPreimage { map: String, y: f64, tol: f64 },

    /// A step size left [0, 1].
    #[error("step size {value} at index {index} is outside [0, 1]")]
    Schedule { value: f64, index: usize },

    /// Best approximation over an empty set.
    #[error("set of candidate points is empty")]
    EmptySet,

    /// A bundle of maps does not match the arity the inequality needs.
    #[error("inequality `{kind}` needs {expected}, got {got}")]
    ArityMismatch {
        kind: String,
        expected: &'static str,
        got: &'static str,
    },

    /// Maps in one check must share a single domain.
    #[error("maps `{a}` and `{b}` do not share a domain")]
    DomainMismatch { a: String, b: String },

    /// Invalid construction (intervals, branches, schedules, configs).
    #[error("{0}")]
    Invalid(String),
}

impl CoreError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CoreError::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
