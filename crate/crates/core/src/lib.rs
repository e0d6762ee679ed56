//! Solvers for generalized optimal partial transport (GOPT) between discrete
//! measures.
//!
//! Three independent routes compute the same optima and check each other:
//!
//! * [`sinkhorn`]: entropic scaling with TV / PTV proximal-divide updates,
//!   run in the log domain so small `epsilon` does not underflow.
//! * [`exact_lp`]: the dummy-point reduction of PTV-penalized GOPT to a
//!   balanced transport problem, solved by a transportation simplex.
//! * [`mopt`]: mass-constrained partial transport, both as an augmented LP
//!   and as Dykstra's algorithm over KL (Bregman) projections.
//!
//! [`oracle`] holds a dense two-phase simplex and a vertex enumerator used
//! only to certify the other solvers. [`cli`] is the file-driven front end
//! backing the `gopt` binary.

pub mod cli;
pub mod divergence;
pub mod error;
pub mod exact_lp;
pub mod measures;
pub mod mopt;
pub mod oracle;
pub mod report;
pub mod sinkhorn;

pub(crate) mod logsum;

pub use error::{GoptError, Result};
pub use measures::{
    gopt_primal_objective, make_cost_sq_euclidean, marginals, CostMatrix, DiscreteMeasure,
    GoptProblem, ObjectiveTerms, PenaltyKind, TransportPlan,
};
pub use report::SolveReport;
