use crate::measures::{ObjectiveTerms, TransportPlan};
use crate::sinkhorn::DualPotentials;

/// Outcome of any solver in the crate.
///
/// `objective` is always the unregularized GOPT/MOPT objective of `plan`.
/// `primal_value` is the objective the solver actually minimized: the
/// entropic objective for scaling solvers, the exact objective otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solver: &'static str,
    pub plan: TransportPlan,
    pub objective: ObjectiveTerms,
    pub potentials: Option<DualPotentials>,
    pub primal_value: f64,
    pub dual_value: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, gap)` checkpoints recorded by iterative solvers.
    pub gap_history: Vec<(usize, f64)>,
}
