use thiserror::Error;

/// Errors raised while building problems or running a solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GoptError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested solver cannot handle this problem (e.g. TV penalties
    /// handed to the LP reduction).
    #[error("unsupported problem for this solver: {0}")]
    Unsupported(String),

    #[error("unbalanced masses: source {source_mass} vs target {target_mass}")]
    Unbalanced { source_mass: f64, target_mass: f64 },

    /// Two routes that must agree did not; indicates a solver bug.
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    /// Internal LP failure; indicates a formulation bug rather than bad user input.
    #[error("linear program is {0}")]
    Lp(LpStatus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "stuck at the iteration limit",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, GoptError>;
