//! Value types shared by every solver: discrete measures, cost matrices,
//! transport plans and the GOPT problem itself.

use ndarray::{Array1, Array2, Axis};

use crate::divergence::{weighted_ptv_penalty, weighted_tv_penalty};
use crate::error::{GoptError, Result};

/// Absolute slack allowed when checking `plan marginal <= measure`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A finite weighted point cloud. Weights are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    weights: Array1<f64>,
    labels: Option<Vec<Vec<f64>>>,
}

impl DiscreteMeasure {
    pub fn new(weights: impl Into<Array1<f64>>) -> Result<Self> {
        let weights = weights.into();
        if weights.is_empty() {
            return Err(GoptError::InvalidInput("measure has no atoms".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(GoptError::InvalidInput(format!(
                "atom {i} has weight {w}; weights must be finite and strictly positive"
            )));
        }
        Ok(Self {
            weights,
            labels: None,
        })
    }

    /// Attach support coordinates, one point per atom.
    pub fn with_labels(mut self, labels: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(GoptError::Dimension(format!(
                "{} labels for {} atoms",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[Vec<f64>]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.sum()
    }
}

/// Dense finite cost matrix. User-facing costs are non-negative; the
/// augmented matrices built by the LP reductions are `relaxed` and may hold
/// negative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Array2<f64>,
    relaxed: bool,
}

impl CostMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        Self::check_finite(&entries)?;
        if let Some(v) = entries.iter().find(|v| **v < 0.0) {
            return Err(GoptError::InvalidInput(format!(
                "cost entry {v} is negative"
            )));
        }
        Ok(Self {
            entries,
            relaxed: false,
        })
    }

    /// Finite entries of either sign.
    pub fn relaxed(entries: Array2<f64>) -> Result<Self> {
        Self::check_finite(&entries)?;
        Ok(Self {
            entries,
            relaxed: true,
        })
    }

    fn check_finite(entries: &Array2<f64>) -> Result<()> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(GoptError::InvalidInput("cost matrix is empty".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(GoptError::InvalidInput(
                "cost matrix has a non-finite entry".into(),
            ));
        }
        Ok(())
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Squared Euclidean cost between two point lists.
pub fn make_cost_sq_euclidean(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<CostMatrix> {
    let dim = xs
        .first()
        .or(ys.first())
        .map(Vec::len)
        .ok_or_else(|| GoptError::InvalidInput("no points".into()))?;
    if dim == 0 {
        return Err(GoptError::Dimension(
            "points must have dimension >= 1".into(),
        ));
    }
    if let Some(p) = xs.iter().chain(ys).find(|p| p.len() != dim) {
        return Err(GoptError::Dimension(format!(
            "point of dimension {} among points of dimension {dim}",
            p.len()
        )));
    }
    let entries = Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| {
        xs[i]
            .iter()
            .zip(&ys[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    });
    CostMatrix::new(entries)
}

/// Row sums, column sums and total mass of a non-negative matrix.
pub fn marginals(matrix: &Array2<f64>) -> Result<(Array1<f64>, Array1<f64>, f64)> {
    if let Some(v) = matrix.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "plan entry {v} is negative or NaN"
        )));
    }
    let rows = matrix.sum_axis(Axis(1));
    let cols = matrix.sum_axis(Axis(0));
    let total = rows.sum();
    Ok((rows, cols, total))
}

/// A non-negative coupling matrix with cached marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    matrix: Array2<f64>,
    row_marginal: Array1<f64>,
    col_marginal: Array1<f64>,
    total_mass: f64,
}

impl TransportPlan {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        let (row_marginal, col_marginal, total_mass) = marginals(&matrix)?;
        Ok(Self {
            matrix,
            row_marginal,
            col_marginal,
            total_mass,
        })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self::new(Array2::zeros((n, m))).expect("zero plan is valid")
    }

    /// Rebuild a plan from `(i, j, mass)` triplets; repeated cells add up.
    pub fn from_triplets(n: usize, m: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut matrix = Array2::zeros((n, m));
        for &(i, j, mass) in triplets {
            if i >= n || j >= m {
                return Err(GoptError::Dimension(format!(
                    "triplet ({i}, {j}) outside a {n}x{m} plan"
                )));
            }
            matrix[[i, j]] += mass;
        }
        Self::new(matrix)
    }

    /// Entries strictly above `threshold`, row-major.
    pub fn triplets(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        self.matrix
            .indexed_iter()
            .filter(|(_, &v)| v > threshold)
            .map(|((i, j), &v)| (i, j, v))
            .collect()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.matrix
    }

    pub fn row_marginal(&self) -> &Array1<f64> {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &Array1<f64> {
        &self.col_marginal
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Marginal penalty attached to one side of a GOPT problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    /// `sum lambda |measure - marginal|`; the marginal may exceed the measure.
    Tv,
    /// `sum lambda (measure - marginal)` plus the hard constraint
    /// `marginal <= measure`.
    Ptv,
}

/// Cost, two measures and a point-dependent penalty field on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct GoptProblem {
    pub cost: CostMatrix,
    pub p: DiscreteMeasure,
    pub q: DiscreteMeasure,
    pub lambda1: Array1<f64>,
    pub lambda2: Array1<f64>,
    pub penalty1: PenaltyKind,
    pub penalty2: PenaltyKind,
}

impl GoptProblem {
    pub fn new(
        cost: CostMatrix,
        p: DiscreteMeasure,
        q: DiscreteMeasure,
        lambda1: impl Into<Array1<f64>>,
        lambda2: impl Into<Array1<f64>>,
        penalty1: PenaltyKind,
        penalty2: PenaltyKind,
    ) -> Result<Self> {
        let lambda1 = lambda1.into();
        let lambda2 = lambda2.into();
        let (n, m) = (p.len(), q.len());
        if cost.nrows() != n || cost.ncols() != m {
            return Err(GoptError::Dimension(format!(
                "cost is {}x{} but measures have {n} and {m} atoms",
                cost.nrows(),
                cost.ncols()
            )));
        }
        if lambda1.len() != n || lambda2.len() != m {
            return Err(GoptError::Dimension(format!(
                "lambda lengths ({}, {}) do not match measures ({n}, {m})",
                lambda1.len(),
                lambda2.len()
            )));
        }
        for (name, lambda) in [("lambda1", &lambda1), ("lambda2", &lambda2)] {
            if lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
                return Err(GoptError::InvalidInput(format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        if cost.is_relaxed() {
            return Err(GoptError::InvalidInput(
                "GOPT costs must be non-negative".into(),
            ));
        }
        Ok(Self {
            cost,
            p,
            q,
            lambda1,
            lambda2,
            penalty1,
            penalty2,
        })
    }

    /// Same scalar penalty on every atom of both sides.
    pub fn with_constant_lambda(
        cost: CostMatrix,
        p: DiscreteMeasure,
        q: DiscreteMeasure,
        lambda: f64,
        penalty1: PenaltyKind,
        penalty2: PenaltyKind,
    ) -> Result<Self> {
        let l1 = Array1::from_elem(p.len(), lambda);
        let l2 = Array1::from_elem(q.len(), lambda);
        Self::new(cost, p, q, l1, l2, penalty1, penalty2)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn m(&self) -> usize {
        self.q.len()
    }
}

/// Objective split into its transport and two penalty parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerms {
    pub transport: f64,
    pub penalty1: f64,
    pub penalty2: f64,
    pub total: f64,
}

impl ObjectiveTerms {
    pub fn new(transport: f64, penalty1: f64, penalty2: f64) -> Self {
        Self {
            transport,
            penalty1,
            penalty2,
            total: transport + penalty1 + penalty2,
        }
    }
}

pub(crate) fn side_penalty(
    kind: PenaltyKind,
    lambda: &Array1<f64>,
    marginal: &Array1<f64>,
    measure: &Array1<f64>,
    tol: f64,
) -> f64 {
    let (l, a, b) = (
        lambda.as_slice().expect("contiguous"),
        marginal.as_slice().expect("contiguous"),
        measure.as_slice().expect("contiguous"),
    );
    match kind {
        PenaltyKind::Tv => weighted_tv_penalty(l, a, b),
        PenaltyKind::Ptv => weighted_ptv_penalty(l, a, b, tol),
    }
}

/// Evaluate the unregularized GOPT objective of `plan`.
pub fn gopt_primal_objective(
    problem: &GoptProblem,
    plan: &TransportPlan,
) -> Result<ObjectiveTerms> {
    gopt_primal_objective_with_tol(problem, plan, FEASIBILITY_TOL)
}

/// As [`gopt_primal_objective`] with an explicit feasibility band for the
/// PTV indicator.
pub fn gopt_primal_objective_with_tol(
    problem: &GoptProblem,
    plan: &TransportPlan,
    tol: f64,
) -> Result<ObjectiveTerms> {
    if plan.nrows() != problem.n() || plan.ncols() != problem.m() {
        return Err(GoptError::Dimension(format!(
            "plan is {}x{}, problem is {}x{}",
            plan.nrows(),
            plan.ncols(),
            problem.n(),
            problem.m()
        )));
    }
    let transport = (problem.cost.entries() * plan.matrix()).sum();
    let penalty1 = side_penalty(
        problem.penalty1,
        &problem.lambda1,
        plan.row_marginal(),
        problem.p.weights(),
        tol,
    );
    let penalty2 = side_penalty(
        problem.penalty2,
        &problem.lambda2,
        plan.col_marginal(),
        problem.q.weights(),
        tol,
    );
    Ok(ObjectiveTerms::new(transport, penalty1, penalty2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn unit_problem(kind: PenaltyKind) -> GoptProblem {
        GoptProblem::new(
            CostMatrix::new(array![[1.0]]).unwrap(),
            DiscreteMeasure::new(array![1.0]).unwrap(),
            DiscreteMeasure::new(array![1.0]).unwrap(),
            array![5.0],
            array![5.0],
            kind,
            kind,
        )
        .unwrap()
    }

    #[test]
    fn sq_euclidean_examples() {
        let c = make_cost_sq_euclidean(&[vec![0.0]], &[vec![0.0]]).unwrap();
        assert_eq!(c.entries(), &array![[0.0]]);
        let c = make_cost_sq_euclidean(&[vec![0.0]], &[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(c.entries(), &array![[0.0, 1.0]]);
        let c =
            make_cost_sq_euclidean(&[vec![0.0, 0.0], vec![1.0, 1.0]], &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(c.entries(), &array![[1.0], [1.0]]);
    }

    #[test]
    fn sq_euclidean_rejects_mixed_dimensions() {
        let err = make_cost_sq_euclidean(&[vec![0.0]], &[vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, GoptError::Dimension(_)));
    }

    #[test]
    fn marginal_examples() {
        let (r, c, t) = marginals(&array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!((r, c, t), (array![3.0, 7.0], array![4.0, 6.0], 10.0));
        let (r, c, t) = marginals(&Array2::zeros((2, 2))).unwrap();
        assert_eq!((r, c, t), (array![0.0, 0.0], array![0.0, 0.0], 0.0));
        let (r, c, t) = marginals(&Array2::eye(2)).unwrap();
        assert_eq!((r, c, t), (array![1.0, 1.0], array![1.0, 1.0], 2.0));
        assert!(marginals(&array![[1.0, -0.5]]).is_err());
    }

    #[test]
    fn measure_rejects_zero_weight() {
        assert!(DiscreteMeasure::new(array![1.0, 0.0]).is_err());
        assert!(DiscreteMeasure::new(array![1.0, f64::NAN]).is_err());
        assert!(DiscreteMeasure::new(Array1::<f64>::zeros(0)).is_err());
    }

    #[test]
    fn problem_checks_dimensions_and_lambda() {
        let cost = CostMatrix::new(array![[1.0, 2.0]]).unwrap();
        let p = DiscreteMeasure::new(array![1.0]).unwrap();
        let q = DiscreteMeasure::new(array![1.0, 1.0]).unwrap();
        let bad = GoptProblem::new(
            cost.clone(),
            p.clone(),
            q.clone(),
            array![1.0],
            array![1.0],
            PenaltyKind::Tv,
            PenaltyKind::Tv,
        );
        assert!(matches!(bad, Err(GoptError::Dimension(_))));
        let bad = GoptProblem::new(
            cost,
            p,
            q,
            array![-1.0],
            array![1.0, 1.0],
            PenaltyKind::Tv,
            PenaltyKind::Tv,
        );
        assert!(matches!(bad, Err(GoptError::InvalidInput(_))));
        assert!(CostMatrix::new(array![[-1.0]]).is_err());
        assert!(CostMatrix::relaxed(array![[-1.0]]).is_ok());
    }

    #[test]
    fn objective_examples() {
        let problem = unit_problem(PenaltyKind::Tv);
        let full = TransportPlan::new(array![[1.0]]).unwrap();
        assert_eq!(
            gopt_primal_objective(&problem, &full).unwrap(),
            ObjectiveTerms::new(1.0, 0.0, 0.0)
        );
        let empty = TransportPlan::zeros(1, 1);
        assert_eq!(
            gopt_primal_objective(&problem, &empty).unwrap(),
            ObjectiveTerms::new(0.0, 5.0, 5.0)
        );
    }

    #[test]
    fn tv_allows_duplicating_the_source() {
        // mu = delta_0, nu = delta_0 + delta_1, lambda1 = 0, lambda2 = 100
        let cost = make_cost_sq_euclidean(&[vec![0.0]], &[vec![0.0], vec![1.0]]).unwrap();
        let problem = GoptProblem::new(
            cost,
            DiscreteMeasure::new(array![1.0]).unwrap(),
            DiscreteMeasure::new(array![1.0, 1.0]).unwrap(),
            array![0.0],
            array![100.0, 100.0],
            PenaltyKind::Tv,
            PenaltyKind::Tv,
        )
        .unwrap();
        let plan = TransportPlan::new(array![[1.0, 1.0]]).unwrap();
        let obj = gopt_primal_objective(&problem, &plan).unwrap();
        assert_eq!(obj, ObjectiveTerms::new(1.0, 0.0, 0.0));
        assert!(plan.row_marginal()[0] > problem.p.weights()[0]);

        let mut ptv = problem.clone();
        ptv.penalty1 = PenaltyKind::Ptv;
        assert_eq!(
            gopt_primal_objective(&ptv, &plan).unwrap().total,
            f64::INFINITY
        );
    }

    #[test]
    fn triplets_round_trip() {
        let plan = TransportPlan::new(array![[0.0, 2.0], [1e-14, 3.0]]).unwrap();
        let trip = plan.triplets(1e-12);
        assert_eq!(trip, vec![(0, 1, 2.0), (1, 1, 3.0)]);
        let back = TransportPlan::from_triplets(2, 2, &trip).unwrap();
        assert_eq!(back.total_mass(), 5.0);
        assert!(TransportPlan::from_triplets(1, 1, &[(1, 0, 1.0)]).is_err());
    }
}
