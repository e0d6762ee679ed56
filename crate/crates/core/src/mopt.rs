//! Mass-constrained partial transport: move exactly `eta` units of mass
//! with marginals bounded by `p` and `q`.
//!
//! Two solvers: an augmented balanced LP (exact) and Dykstra's algorithm on
//! the entropic problem `min KL(gamma || K)` over the intersection of the
//! three constraint sets `{rows <= p}`, `{cols <= q}`, `{sum = eta}`.

use ndarray::{s, Array1, Array2, Axis};

use crate::error::{GoptError, Result};
use crate::exact_lp::{solve_balanced_ot, AugmentedProblem};
use crate::logsum::log_sum_exp;
use crate::measures::{CostMatrix, DiscreteMeasure, ObjectiveTerms, TransportPlan};
use crate::report::SolveReport;

/// Absolute tolerance on `|plan| = eta` for the LP route.
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MoptProblem {
    pub cost: CostMatrix,
    pub p: DiscreteMeasure,
    pub q: DiscreteMeasure,
    pub eta: f64,
}

impl MoptProblem {
    pub fn new(cost: CostMatrix, p: DiscreteMeasure, q: DiscreteMeasure, eta: f64) -> Result<Self> {
        if cost.nrows() != p.len() || cost.ncols() != q.len() {
            return Err(GoptError::Dimension(format!(
                "cost is {}x{}, measures have {} and {} atoms",
                cost.nrows(),
                cost.ncols(),
                p.len(),
                q.len()
            )));
        }
        if cost.is_relaxed() {
            return Err(GoptError::InvalidInput(
                "MOPT costs must be non-negative".into(),
            ));
        }
        let cap = p.mass().min(q.mass());
        if !(eta.is_finite() && eta >= 0.0 && eta <= cap * (1.0 + 1e-12)) {
            return Err(GoptError::InvalidInput(format!(
                "eta = {eta} must lie in [0, {cap}]"
            )));
        }
        Ok(Self {
            cost,
            p,
            q,
            eta: eta.min(cap),
        })
    }
}

/// Augmented matrices for the MOPT reduction: interior cost `c`, dummy
/// corner `max(c) + 2 alpha + beta`, all other border cells `alpha`;
/// `p_hat = (p, |q| - eta)`, `q_hat = (q, |p| - eta)`.
pub fn build_mopt_augmented(
    problem: &MoptProblem,
    alpha: f64,
    beta: f64,
) -> Result<AugmentedProblem> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "alpha = {alpha} must be >= 0"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "beta = {beta} must be > 0"
        )));
    }
    let c = problem.cost.entries();
    let (n, m) = c.dim();
    let mut c_hat = Array2::from_elem((n + 1, m + 1), alpha);
    c_hat.slice_mut(s![..n, ..m]).assign(c);
    c_hat[[n, m]] = problem.cost.max() + 2.0 * alpha + beta;
    let (p, q) = (problem.p.weights(), problem.q.weights());
    let mut p_hat = Array1::zeros(n + 1);
    p_hat.slice_mut(s![..n]).assign(p);
    p_hat[n] = (q.sum() - problem.eta).max(0.0);
    let mut q_hat = Array1::zeros(m + 1);
    q_hat.slice_mut(s![..m]).assign(q);
    q_hat[m] = (p.sum() - problem.eta).max(0.0);
    // <c_hat, gamma_hat> = <c, gamma> + alpha (|p| + |q| - 2 eta) at any optimum
    let offset = -alpha * (p.sum() + q.sum() - 2.0 * problem.eta);
    Ok(AugmentedProblem {
        c_hat: CostMatrix::relaxed(c_hat)?,
        p_hat,
        q_hat,
        offset,
    })
}

/// Exact MOPT via the augmented balanced problem.
pub fn solve_mopt_lp(problem: &MoptProblem, alpha: f64, beta: f64) -> Result<SolveReport> {
    let aug = build_mopt_augmented(problem, alpha, beta)?;
    let balanced = aug.balanced()?;
    let sol = solve_balanced_ot(&balanced)?;
    let (n, m) = (aug.n(), aug.m());
    let plan = TransportPlan::new(sol.plan.slice(s![..n, ..m]).to_owned())?;
    if (plan.total_mass() - problem.eta).abs() > MASS_TOL * (1.0 + problem.eta) {
        return Err(GoptError::Internal(format!(
            "MOPT block carries mass {} instead of {}",
            plan.total_mass(),
            problem.eta
        )));
    }
    let transport = (problem.cost.entries() * plan.matrix()).sum();
    let dual = sol.dual_value(&balanced) + aug.offset;
    Ok(SolveReport {
        solver: "mopt-lp",
        plan,
        objective: ObjectiveTerms::new(transport, 0.0, 0.0),
        potentials: None,
        primal_value: transport,
        dual_value: Some(dual),
        gap: Some(transport - dual),
        iterations: sol.pivots,
        converged: true,
        gap_history: Vec::new(),
    })
}

/// KL projection onto `{gamma 1 <= p}`: scale each overfull row down.
pub fn bregman_project_rows(gamma: &Array2<f64>, p: &Array1<f64>) -> Array2<f64> {
    let rows = gamma.sum_axis(Axis(1));
    let scale = Array1::from_iter(rows.iter().zip(p).map(|(&r, &t)| (t / r).min(1.0)));
    gamma * &scale.insert_axis(Axis(1))
}

/// KL projection onto `{gamma^T 1 <= q}`.
pub fn bregman_project_cols(gamma: &Array2<f64>, q: &Array1<f64>) -> Array2<f64> {
    let cols = gamma.sum_axis(Axis(0));
    let scale = Array1::from_iter(cols.iter().zip(q).map(|(&c, &t)| (t / c).min(1.0)));
    gamma * &scale.insert_axis(Axis(0))
}

/// KL projection onto `{sum gamma = eta}`. `eta = 0` yields the zero matrix.
pub fn bregman_project_mass(gamma: &Array2<f64>, eta: f64) -> Array2<f64> {
    if eta == 0.0 {
        return Array2::zeros(gamma.dim());
    }
    gamma * (eta / gamma.sum())
}

/// Iterate of Dykstra's algorithm, held in the log domain so that
/// `exp(-c / eps)` never underflows: `log_gamma` is `ln gamma`, and
/// `log_corrections[i]` is `ln xi^i` for the three constraint sets.
#[derive(Debug, Clone)]
pub struct DykstraState {
    pub log_gamma: Array2<f64>,
    pub log_corrections: [Array2<f64>; 3],
    /// Number of single projections applied so far.
    pub k: usize,
    log_p: Array1<f64>,
    log_q: Array1<f64>,
    log_eta: f64,
}

impl DykstraState {
    /// `gamma^(0) = K * eta / |K|`, all corrections equal to one.
    pub fn new(problem: &MoptProblem, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(GoptError::InvalidInput(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if problem.eta.is_nan() || problem.eta <= 0.0 {
            return Err(GoptError::InvalidInput(
                "Dykstra iterations need eta > 0".into(),
            ));
        }
        let log_kernel = problem.cost.entries().mapv(|c| -c / epsilon);
        let log_mass = log_sum_exp(log_kernel.iter().copied());
        let log_eta = problem.eta.ln();
        let log_gamma = log_kernel.mapv(|v| v - log_mass + log_eta);
        let zeros = Array2::zeros(log_gamma.dim());
        Ok(Self {
            log_gamma,
            log_corrections: [zeros.clone(), zeros.clone(), zeros],
            k: 0,
            log_p: problem.p.weights().mapv(f64::ln),
            log_q: problem.q.weights().mapv(f64::ln),
            log_eta,
        })
    }

    pub fn gamma(&self) -> Array2<f64> {
        self.log_gamma.mapv(f64::exp)
    }

    fn project(&self, set: usize, mut log_g: Array2<f64>) -> Array2<f64> {
        match set {
            0 => {
                for (mut row, &lp) in log_g.outer_iter_mut().zip(&self.log_p) {
                    let shift = (lp - log_sum_exp(row.iter().copied())).min(0.0);
                    row.mapv_inplace(|v| v + shift);
                }
            }
            1 => {
                for (mut col, &lq) in log_g.columns_mut().into_iter().zip(&self.log_q) {
                    let shift = (lq - log_sum_exp(col.iter().copied())).min(0.0);
                    col.mapv_inplace(|v| v + shift);
                }
            }
            _ => {
                let shift = self.log_eta - log_sum_exp(log_g.iter().copied());
                log_g.mapv_inplace(|v| v + shift);
            }
        }
        log_g
    }

    /// One pass over the three sets in the order rows, columns, mass:
    /// `gamma <- Proj_i(gamma * xi^i)`, `xi^i <- xi^i * gamma_prev / gamma`.
    pub fn sweep(&mut self) {
        for set in 0..3 {
            let shifted = &self.log_gamma + &self.log_corrections[set];
            let next = self.project(set, shifted.clone());
            self.log_corrections[set] = shifted - &next;
            self.log_gamma = next;
            self.k += 1;
        }
    }

    /// Largest violation among row excess, column excess and mass mismatch.
    pub fn residual(&self, problem: &MoptProblem) -> f64 {
        constraint_residual(&self.gamma(), problem)
    }
}

/// `max(max (rows - p)+, max (cols - q)+, |sum - eta|)`.
pub fn constraint_residual(gamma: &Array2<f64>, problem: &MoptProblem) -> f64 {
    let rows = gamma.sum_axis(Axis(1));
    let cols = gamma.sum_axis(Axis(0));
    let row_excess = rows
        .iter()
        .zip(problem.p.weights())
        .fold(0.0f64, |a, (r, p)| a.max(r - p));
    let col_excess = cols
        .iter()
        .zip(problem.q.weights())
        .fold(0.0f64, |a, (c, q)| a.max(c - q));
    row_excess
        .max(col_excess)
        .max((gamma.sum() - problem.eta).abs())
}

/// Residual trace of a Dykstra run, one entry per sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DykstraTrace {
    pub residuals: Vec<f64>,
}

/// Entropic MOPT by Dykstra's algorithm. Converged when, after a sweep,
/// both the constraint residual and the max-norm plan change are below `tol`.
pub fn solve_emopt_dykstra(
    problem: &MoptProblem,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SolveReport> {
    solve_emopt_dykstra_traced(problem, epsilon, max_iters, tol).map(|(r, _)| r)
}

pub fn solve_emopt_dykstra_traced(
    problem: &MoptProblem,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(SolveReport, DykstraTrace)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (n, m) = (problem.p.len(), problem.q.len());
    if problem.eta == 0.0 {
        let report = SolveReport {
            solver: "mopt-dykstra",
            plan: TransportPlan::zeros(n, m),
            objective: ObjectiveTerms::new(0.0, 0.0, 0.0),
            potentials: None,
            primal_value: 0.0,
            dual_value: None,
            gap: None,
            iterations: 0,
            converged: true,
            gap_history: Vec::new(),
        };
        return Ok((
            report,
            DykstraTrace {
                residuals: Vec::new(),
            },
        ));
    }

    let mut state = DykstraState::new(problem, epsilon)?;
    let mut gamma = state.gamma();
    let mut residuals = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        state.sweep();
        let next = state.gamma();
        let change = (&next - &gamma).iter().fold(0.0f64, |a, d| a.max(d.abs()));
        gamma = next;
        let residual = constraint_residual(&gamma, problem);
        residuals.push(residual);
        if residual < tol && change < tol {
            converged = true;
            break;
        }
    }

    let c = problem.cost.entries();
    let transport = (c * &gamma).sum();
    let mut entropy = 0.0;
    for (&lg, &cij) in state.log_gamma.iter().zip(c.iter()) {
        let g = lg.exp();
        if g > 0.0 {
            entropy += g * (lg - 1.0);
        }
        entropy += (-cij / epsilon).exp();
    }
    let report = SolveReport {
        solver: "mopt-dykstra",
        plan: TransportPlan::new(gamma)?,
        objective: ObjectiveTerms::new(transport, 0.0, 0.0),
        potentials: None,
        primal_value: transport + epsilon * entropy,
        dual_value: None,
        gap: None,
        iterations,
        converged,
        gap_history: Vec::new(),
    };
    Ok((report, DykstraTrace { residuals }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn mopt(c: Array2<f64>, p: Array1<f64>, q: Array1<f64>, eta: f64) -> MoptProblem {
        MoptProblem::new(
            CostMatrix::new(c).unwrap(),
            DiscreteMeasure::new(p).unwrap(),
            DiscreteMeasure::new(q).unwrap(),
            eta,
        )
        .unwrap()
    }

    #[test]
    fn eta_range_is_enforced() {
        let c = CostMatrix::new(array![[1.0]]).unwrap();
        let p = DiscreteMeasure::new(array![1.0]).unwrap();
        assert!(MoptProblem::new(c.clone(), p.clone(), p.clone(), 1.5).is_err());
        assert!(MoptProblem::new(c.clone(), p.clone(), p.clone(), -0.1).is_err());
        assert!(MoptProblem::new(c, p.clone(), p, 1.0).is_ok());
    }

    #[test]
    fn augmented_examples() {
        let aug = build_mopt_augmented(
            &mopt(array![[1.0]], array![1.0], array![1.0], 1.0),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(aug.c_hat.entries(), &array![[1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(aug.p_hat, array![1.0, 0.0]);
        assert_eq!(aug.q_hat, array![1.0, 0.0]);

        let aug = build_mopt_augmented(
            &mopt(array![[1.0]], array![1.0], array![1.0], 0.5),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(aug.p_hat, array![1.0, 0.5]);
        assert_eq!(aug.q_hat, array![1.0, 0.5]);

        let pr = mopt(
            array![[0.0, 4.0], [4.0, 0.0]],
            array![1.0, 1.0],
            array![1.0, 1.0],
            1.0,
        );
        let aug = build_mopt_augmented(&pr, 1.0, 1.0).unwrap();
        let c = aug.c_hat.entries();
        assert_eq!(c[[2, 2]], 7.0);
        assert_eq!(
            (c[[0, 2]], c[[1, 2]], c[[2, 0]], c[[2, 1]]),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_abs_diff_eq!(aug.p_hat.sum(), aug.q_hat.sum());
        assert_abs_diff_eq!(aug.p_hat.sum(), 3.0);

        assert!(build_mopt_augmented(&pr, -1.0, 1.0).is_err());
        assert!(build_mopt_augmented(&pr, 0.0, 0.0).is_err());
    }

    #[test]
    fn lp_examples() {
        let pr = mopt(
            array![[0.0, 4.0], [4.0, 0.0]],
            array![1.0, 1.0],
            array![1.0, 1.0],
            1.0,
        );
        let r = solve_mopt_lp(&pr, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.objective.total, 0.0);
        assert_abs_diff_eq!(r.plan.total_mass(), 1.0, epsilon = 1e-12);
        assert_eq!(r.plan.matrix()[[0, 1]] + r.plan.matrix()[[1, 0]], 0.0);

        let r = solve_mopt_lp(
            &mopt(array![[1.0]], array![1.0], array![1.0], 1.0),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(r.plan.matrix(), &array![[1.0]]);
        assert_eq!(r.objective.total, 1.0);

        let r = solve_mopt_lp(
            &mopt(array![[1.0, 2.0]], array![1.0], array![1.0, 1.0], 0.0),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(r.plan.total_mass(), 0.0);
        assert_eq!(r.objective.total, 0.0);
        assert_abs_diff_eq!(r.gap.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(
            bregman_project_rows(&array![[2.0]], &array![1.0]),
            array![[1.0]]
        );
        assert_eq!(
            bregman_project_rows(&array![[0.5]], &array![1.0]),
            array![[0.5]]
        );
        assert_eq!(
            bregman_project_rows(&array![[1.0, 1.0], [1.0, 1.0]], &array![1.0, 4.0]),
            array![[0.5, 0.5], [1.0, 1.0]]
        );
        assert_eq!(
            bregman_project_cols(&array![[2.0]], &array![1.0]),
            array![[1.0]]
        );
        assert_eq!(
            bregman_project_cols(&array![[1.0], [1.0]], &array![1.0]),
            array![[0.5], [0.5]]
        );
        assert_eq!(
            bregman_project_cols(&array![[0.2]], &array![1.0]),
            array![[0.2]]
        );
        assert_eq!(
            bregman_project_mass(&array![[2.0, 2.0]], 1.0),
            array![[0.5, 0.5]]
        );
        assert_eq!(
            bregman_project_mass(&array![[0.25, 0.75]], 1.0),
            array![[0.25, 0.75]]
        );
        assert_eq!(bregman_project_mass(&array![[1.0]], 3.0), array![[3.0]]);
        assert_eq!(bregman_project_mass(&array![[1.0]], 0.0), array![[0.0]]);
    }

    #[test]
    fn log_projections_match_plain_ones() {
        let pr = mopt(
            array![[0.1, 0.9, 0.4], [0.5, 0.2, 0.3]],
            array![0.3, 0.6],
            array![0.2, 0.5, 0.4],
            0.5,
        );
        let state = DykstraState::new(&pr, 0.7).unwrap();
        let g = state.gamma();
        let rows = state.project(0, state.log_gamma.clone()).mapv(f64::exp);
        let cols = state.project(1, state.log_gamma.clone()).mapv(f64::exp);
        let mass = state.project(2, state.log_gamma.clone()).mapv(f64::exp);
        let close =
            |a: &Array2<f64>, b: &Array2<f64>| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14);
        assert!(close(&rows, &bregman_project_rows(&g, pr.p.weights())));
        assert!(close(&cols, &bregman_project_cols(&g, pr.q.weights())));
        assert!(close(&mass, &bregman_project_mass(&g, 0.5)));
        assert_abs_diff_eq!(g.sum(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn dykstra_trivial_instance() {
        let r = solve_emopt_dykstra(
            &mopt(array![[0.0]], array![1.0], array![1.0], 1.0),
            1.0,
            1000,
            1e-10,
        )
        .unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.plan.matrix()[[0, 0]], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn dykstra_concentrates_on_the_diagonal() {
        let pr = mopt(
            array![[0.0, 4.0], [4.0, 0.0]],
            array![1.0, 1.0],
            array![1.0, 1.0],
            1.0,
        );
        let r = solve_emopt_dykstra(&pr, 0.01, 50_000, 1e-8).unwrap();
        assert!(r.converged);
        let g = r.plan.matrix();
        assert!(g[[0, 0]] + g[[1, 1]] >= 0.99);
        assert!(r.objective.transport <= 0.04);
    }

    #[test]
    fn dykstra_with_zero_eta_is_trivial() {
        let pr = mopt(array![[1.0, 2.0]], array![1.0], array![1.0, 1.0], 0.0);
        let r = solve_emopt_dykstra(&pr, 0.1, 10, 1e-8).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.plan.total_mass(), 0.0);
    }

    #[test]
    fn mass_is_exact_right_after_the_mass_projection() {
        let pr = mopt(
            array![[0.3, 1.2], [0.8, 0.1], [0.5, 0.5]],
            array![0.4, 0.4, 0.4],
            array![0.7, 0.6],
            0.9,
        );
        let mut state = DykstraState::new(&pr, 0.05).unwrap();
        for _ in 0..25 {
            state.sweep();
            assert_abs_diff_eq!(state.gamma().sum(), 0.9, epsilon = 1e-12);
        }
        assert_eq!(state.k, 75);
    }
}
