//! Exact solvers built on a balanced transportation simplex.
//!
//! PTV-penalized GOPT reduces to balanced transport by adding one dummy
//! atom on each side that absorbs destroyed or created mass; the dummy row
//! and column cost nothing and the interior cost becomes
//! `c_ij - lambda1_i - lambda2_j`.

use std::collections::VecDeque;

use ndarray::{s, Array1, Array2};

use crate::error::{GoptError, LpStatus, Result};
use crate::measures::{
    gopt_primal_objective, CostMatrix, DiscreteMeasure, GoptProblem, PenaltyKind, TransportPlan,
};
use crate::report::SolveReport;

/// Relative tolerance for `sum(rows) == sum(cols)`.
pub const BALANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedOtProblem {
    cost: Array2<f64>,
    row_masses: Array1<f64>,
    col_masses: Array1<f64>,
}

impl BalancedOtProblem {
    /// Masses must be non-negative and balanced within [`BALANCE_TOL`]; the
    /// column masses are rescaled so both sides sum to the same value.
    pub fn new(
        cost: Array2<f64>,
        row_masses: Array1<f64>,
        col_masses: Array1<f64>,
    ) -> Result<Self> {
        let (n, m) = cost.dim();
        if n == 0 || m == 0 {
            return Err(GoptError::InvalidInput("empty transport problem".into()));
        }
        if row_masses.len() != n || col_masses.len() != m {
            return Err(GoptError::Dimension(format!(
                "cost is {n}x{m}, masses have {} and {} entries",
                row_masses.len(),
                col_masses.len()
            )));
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(GoptError::InvalidInput("non-finite cost".into()));
        }
        if row_masses
            .iter()
            .chain(&col_masses)
            .any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return Err(GoptError::InvalidInput(
                "masses must be finite and >= 0".into(),
            ));
        }
        let source_mass = compensated_sum(row_masses.iter().copied());
        let target_mass = compensated_sum(col_masses.iter().copied());
        let scale = source_mass.max(target_mass);
        if (source_mass - target_mass).abs() > BALANCE_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(GoptError::Unbalanced {
                source_mass,
                target_mass,
            });
        }
        let col_masses = if target_mass > 0.0 && source_mass != target_mass {
            col_masses * (source_mass / target_mass)
        } else {
            col_masses
        };
        Ok(Self {
            cost,
            row_masses,
            col_masses,
        })
    }

    pub fn cost(&self) -> &Array2<f64> {
        &self.cost
    }

    pub fn row_masses(&self) -> &Array1<f64> {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &Array1<f64> {
        &self.col_masses
    }
}

/// Kahan summation.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Optimal plan of a balanced problem with a certificate: the potentials
/// satisfy `c_ij - alpha_i - beta_j >= 0` everywhere, with equality on the
/// basis (which contains the support of the plan).
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedOtSolution {
    pub plan: Array2<f64>,
    pub value: f64,
    pub row_potentials: Array1<f64>,
    pub col_potentials: Array1<f64>,
    pub pivots: usize,
}

impl BalancedOtSolution {
    /// `sum alpha_i a_i + sum beta_j b_j`.
    pub fn dual_value(&self, problem: &BalancedOtProblem) -> f64 {
        self.row_potentials.dot(&problem.row_masses) + self.col_potentials.dot(&problem.col_masses)
    }
}

/// Spanning-tree basis of the transportation polytope. Nodes `0..n` are
/// rows, `n..n+m` are columns.
struct TreeBasis {
    n: usize,
    m: usize,
    basic: Vec<bool>,
    flow: Array2<f64>,
}

impl TreeBasis {
    /// North-west corner rule. Produces exactly `n + m - 1` basic cells,
    /// some possibly carrying zero flow.
    fn northwest(rows: &Array1<f64>, cols: &Array1<f64>) -> Self {
        let (n, m) = (rows.len(), cols.len());
        let mut supply = rows.to_vec();
        let mut demand = cols.to_vec();
        let mut basic = vec![false; n * m];
        let mut flow = Array2::zeros((n, m));
        let (mut i, mut j) = (0, 0);
        loop {
            let x = supply[i].min(demand[j]);
            flow[[i, j]] = x;
            basic[i * m + j] = true;
            supply[i] -= x;
            demand[j] -= x;
            if i == n - 1 && j == m - 1 {
                break;
            }
            if i == n - 1 {
                j += 1;
            } else if j == m - 1 || supply[i] <= demand[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { n, m, basic, flow }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + self.m];
        for i in 0..self.n {
            for j in 0..self.m {
                if self.basic[i * self.m + j] {
                    adj[i].push(self.n + j);
                    adj[self.n + j].push(i);
                }
            }
        }
        adj
    }

    /// Potentials with `alpha_0 = 0` and `alpha_i + beta_j = c_ij` on the basis.
    fn potentials(&self, cost: &Array2<f64>, adj: &[Vec<usize>]) -> (Array1<f64>, Array1<f64>) {
        let (n, _) = (self.n, self.m);
        let mut value = vec![f64::NAN; n + self.m];
        value[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for &next in &adj[node] {
                if value[next].is_nan() {
                    value[next] = if node < n {
                        cost[[node, next - n]] - value[node]
                    } else {
                        cost[[next, node - n]] - value[node]
                    };
                    queue.push_back(next);
                }
            }
        }
        let alpha = Array1::from_iter(value[..n].iter().copied());
        let beta = Array1::from_iter(value[n..].iter().copied());
        (alpha, beta)
    }

    /// Tree path from `from` to `to` as a node list.
    fn path(&self, adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n + self.m];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn cell(&self, a: usize, b: usize) -> (usize, usize) {
        if a < self.n {
            (a, b - self.n)
        } else {
            (b, a - self.n)
        }
    }
}

/// Exact balanced transport by the transportation simplex with Bland's
/// rule: the entering cell is the first (row-major) cell with negative
/// reduced cost, the leaving cell the lowest-indexed one among ratio-test
/// ties. Negative costs are fine.
pub fn solve_balanced_ot(problem: &BalancedOtProblem) -> Result<BalancedOtSolution> {
    let cost = &problem.cost;
    let (n, m) = cost.dim();
    let scale = cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    let threshold = -1e-11 * scale;
    let mut basis = TreeBasis::northwest(&problem.row_masses, &problem.col_masses);
    let max_pivots = 50 * (n * m + n + m).pow(2).max(1000);
    let mut pivots = 0;

    loop {
        let adj = basis.adjacency();
        let (alpha, beta) = basis.potentials(cost, &adj);
        let entering = (0..n * m).find(|&k| {
            let (i, j) = (k / m, k % m);
            !basis.basic[k] && cost[[i, j]] - alpha[i] - beta[j] < threshold
        });
        let Some(k) = entering else {
            let value = (cost * &basis.flow).sum();
            return Ok(BalancedOtSolution {
                plan: basis.flow,
                value,
                row_potentials: alpha,
                col_potentials: beta,
                pivots,
            });
        };
        if pivots >= max_pivots {
            return Err(GoptError::Lp(LpStatus::IterationLimit));
        }
        pivots += 1;

        let (ei, ej) = (k / m, k % m);
        // Cycle: entering cell (+), then along the tree path from column ej
        // back to row ei with alternating signs starting with (-).
        let path = basis.path(&adj, n + ej, ei);
        let cells: Vec<(usize, usize)> = path.windows(2).map(|w| basis.cell(w[0], w[1])).collect();
        let mut theta = f64::INFINITY;
        let mut leaving = usize::MAX;
        for &(i, j) in cells.iter().step_by(2) {
            let f = basis.flow[[i, j]];
            let idx = i * m + j;
            if f < theta || (f == theta && idx < leaving) {
                theta = f;
                leaving = idx;
            }
        }
        basis.flow[[ei, ej]] += theta;
        for (t, &(i, j)) in cells.iter().enumerate() {
            let cell = &mut basis.flow[[i, j]];
            if t % 2 == 0 {
                *cell = (*cell - theta).max(0.0);
            } else {
                *cell += theta;
            }
        }
        basis.basic[k] = true;
        basis.basic[leaving] = false;
        basis.flow[[leaving / m, leaving % m]] = 0.0;
    }
}

/// Balanced problem obtained by adding one dummy atom to each side.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedProblem {
    pub c_hat: CostMatrix,
    pub p_hat: Array1<f64>,
    pub q_hat: Array1<f64>,
    /// Constant added to `<c_hat, gamma_hat>` to recover the original objective.
    pub offset: f64,
}

impl AugmentedProblem {
    pub fn n(&self) -> usize {
        self.p_hat.len() - 1
    }

    pub fn m(&self) -> usize {
        self.q_hat.len() - 1
    }

    pub fn balanced(&self) -> Result<BalancedOtProblem> {
        BalancedOtProblem::new(
            self.c_hat.entries().clone(),
            self.p_hat.clone(),
            self.q_hat.clone(),
        )
    }
}

fn require_ptv(problem: &GoptProblem) -> Result<()> {
    if problem.penalty1 != PenaltyKind::Ptv || problem.penalty2 != PenaltyKind::Ptv {
        return Err(GoptError::Unsupported(
            "the LP reduction needs PTV penalties on both sides; use the sinkhorn or \
             oracle solver for TV penalties"
                .into(),
        ));
    }
    Ok(())
}

/// `c_hat = [c - lambda1 (+) lambda2, 0; 0, 0]`, `p_hat = (p, |q|)`,
/// `q_hat = (q, |p|)`.
pub fn build_augmented(problem: &GoptProblem) -> Result<AugmentedProblem> {
    require_ptv(problem)?;
    let (n, m) = (problem.n(), problem.m());
    let c = problem.cost.entries();
    let mut c_hat = Array2::zeros((n + 1, m + 1));
    for ((i, j), &cij) in c.indexed_iter() {
        c_hat[[i, j]] = cij - problem.lambda1[i] - problem.lambda2[j];
    }
    let p = problem.p.weights();
    let q = problem.q.weights();
    let mut p_hat = Array1::zeros(n + 1);
    p_hat.slice_mut(s![..n]).assign(p);
    p_hat[n] = q.sum();
    let mut q_hat = Array1::zeros(m + 1);
    q_hat.slice_mut(s![..m]).assign(q);
    q_hat[m] = p.sum();
    let offset = problem.lambda1.dot(p) + problem.lambda2.dot(q);
    Ok(AugmentedProblem {
        c_hat: CostMatrix::relaxed(c_hat)?,
        p_hat,
        q_hat,
        offset,
    })
}

/// Inverse of block extraction: `[gamma, p - gamma 1; (q - gamma^T 1)^T, |gamma|]`.
pub fn augment_plan(plan: &Array2<f64>, p: &Array1<f64>, q: &Array1<f64>) -> Array2<f64> {
    let (n, m) = plan.dim();
    let mut full = Array2::zeros((n + 1, m + 1));
    full.slice_mut(s![..n, ..m]).assign(plan);
    let rows = plan.sum_axis(ndarray::Axis(1));
    let cols = plan.sum_axis(ndarray::Axis(0));
    for i in 0..n {
        full[[i, m]] = p[i] - rows[i];
    }
    for j in 0..m {
        full[[n, j]] = q[j] - cols[j];
    }
    full[[n, m]] = plan.sum();
    full
}

/// Exact PTV-penalized GOPT through the augmented balanced problem.
///
/// The objective is evaluated twice, once directly on the extracted block
/// and once as `<c_hat, gamma_hat> + sum lambda1 p + sum lambda2 q`; the two
/// must agree.
pub fn solve_gopt_lp(problem: &GoptProblem) -> Result<SolveReport> {
    let aug = build_augmented(problem)?;
    let balanced = aug.balanced()?;
    let sol = solve_balanced_ot(&balanced)?;
    let (n, m) = (aug.n(), aug.m());
    let block = sol.plan.slice(s![..n, ..m]).to_owned();
    let plan = TransportPlan::new(block)?;
    let objective = gopt_primal_objective(problem, &plan)?;
    let reduced = sol.value + aug.offset;
    let scale = 1.0 + reduced.abs();
    if !objective.total.is_finite() || (objective.total - reduced).abs() > 1e-7 * scale {
        return Err(GoptError::Internal(format!(
            "LP objective routes disagree: direct {} vs reduced {reduced}",
            objective.total
        )));
    }
    let dual = sol.dual_value(&balanced) + aug.offset;
    Ok(SolveReport {
        solver: "lp",
        plan,
        objective,
        potentials: None,
        primal_value: objective.total,
        dual_value: Some(dual),
        gap: Some(reduced - dual),
        iterations: sol.pivots,
        converged: true,
        gap_history: Vec::new(),
    })
}

/// Whether `plan` keeps (at most 1e-9) mass off the cells where
/// `c_ij - lambda1_i - lambda2_j >= eps_prime`.
pub fn check_support_pruning(problem: &GoptProblem, plan: &TransportPlan, eps_prime: f64) -> bool {
    let c = problem.cost.entries();
    let mass: f64 = plan
        .matrix()
        .indexed_iter()
        .filter(|((i, j), _)| c[[*i, *j]] - problem.lambda1[*i] - problem.lambda2[*j] >= eps_prime)
        .map(|(_, &g)| g)
        .sum();
    mass <= 1e-9
}

/// Semi-constrained transport: target marginal exactly `q`, source
/// marginal at most `p`. Solved as PTV-GOPT with `lambda1 = 0` and
/// `lambda2 = max(c) + 1`, which forces the target to saturate.
pub fn solve_sopt(
    cost: &CostMatrix,
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
) -> Result<SolveReport> {
    if q.mass() > p.mass() * (1.0 + BALANCE_TOL) {
        return Err(GoptError::InvalidInput(format!(
            "target mass {} exceeds source mass {}",
            q.mass(),
            p.mass()
        )));
    }
    let lambda2 = cost.max() + 1.0;
    let problem = GoptProblem::new(
        cost.clone(),
        p.clone(),
        q.clone(),
        Array1::zeros(p.len()),
        Array1::from_elem(q.len(), lambda2),
        PenaltyKind::Ptv,
        PenaltyKind::Ptv,
    )?;
    let mut report = solve_gopt_lp(&problem)?;
    let transport = report.objective.transport;
    report.solver = "sopt";
    report.objective = crate::measures::ObjectiveTerms::new(transport, 0.0, 0.0);
    report.primal_value = transport;
    report.gap = report.dual_value.map(|d| transport - d);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn ptv_problem(
        c: Array2<f64>,
        p: Array1<f64>,
        q: Array1<f64>,
        l1: Array1<f64>,
        l2: Array1<f64>,
    ) -> GoptProblem {
        GoptProblem::new(
            CostMatrix::new(c).unwrap(),
            DiscreteMeasure::new(p).unwrap(),
            DiscreteMeasure::new(q).unwrap(),
            l1,
            l2,
            PenaltyKind::Ptv,
            PenaltyKind::Ptv,
        )
        .unwrap()
    }

    fn check_certificate(problem: &BalancedOtProblem, sol: &BalancedOtSolution) {
        let c = problem.cost();
        for ((i, j), &g) in sol.plan.indexed_iter() {
            let rc = c[[i, j]] - sol.row_potentials[i] - sol.col_potentials[j];
            assert!(rc >= -1e-7, "negative reduced cost {rc}");
            if g > 1e-12 {
                assert!(rc.abs() <= 1e-7);
            }
        }
        let rows = sol.plan.sum_axis(ndarray::Axis(1));
        let cols = sol.plan.sum_axis(ndarray::Axis(0));
        for (a, b) in rows.iter().zip(problem.row_masses()) {
            assert!((a - b).abs() <= 1e-9);
        }
        for (a, b) in cols.iter().zip(problem.col_masses()) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert_abs_diff_eq!(sol.value, sol.dual_value(problem), epsilon = 1e-9);
    }

    #[test]
    fn diagonal_optimum() {
        let pr = BalancedOtProblem::new(
            array![[0.0, 1.0], [1.0, 0.0]],
            array![1.0, 1.0],
            array![1.0, 1.0],
        )
        .unwrap();
        let sol = solve_balanced_ot(&pr).unwrap();
        assert_eq!(sol.plan, array![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(sol.value, 0.0);
        check_certificate(&pr, &sol);
    }

    #[test]
    fn forced_plan() {
        let pr = BalancedOtProblem::new(array![[5.0]], array![2.0], array![2.0]).unwrap();
        let sol = solve_balanced_ot(&pr).unwrap();
        assert_eq!(sol.plan, array![[2.0]]);
        assert_eq!(sol.value, 10.0);
    }

    #[test]
    fn rejects_unbalanced_and_mismatched() {
        assert!(matches!(
            BalancedOtProblem::new(array![[1.0]], array![1.0], array![2.0]),
            Err(GoptError::Unbalanced { .. })
        ));
        assert!(matches!(
            BalancedOtProblem::new(array![[1.0, 2.0]], array![1.0], array![1.0]),
            Err(GoptError::Dimension(_))
        ));
    }

    #[test]
    fn zero_masses_are_allowed() {
        let pr = BalancedOtProblem::new(
            array![[1.0, 0.0], [0.0, 2.0]],
            array![1.0, 0.0],
            array![1.0, 0.0],
        )
        .unwrap();
        let sol = solve_balanced_ot(&pr).unwrap();
        assert_eq!(sol.value, 1.0);
        check_certificate(&pr, &sol);
    }

    #[test]
    fn negative_costs_and_degenerate_masses() {
        let pr = BalancedOtProblem::new(
            array![[-3.0, 2.0, 0.5], [1.0, -4.0, 0.0], [0.0, 0.0, -1.0]],
            array![1.0, 1.0, 1.0],
            array![1.0, 1.0, 1.0],
        )
        .unwrap();
        let sol = solve_balanced_ot(&pr).unwrap();
        assert_abs_diff_eq!(sol.value, -8.0, epsilon = 1e-12);
        check_certificate(&pr, &sol);
    }

    #[test]
    fn augmented_examples() {
        let pr = ptv_problem(
            array![[3.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
        );
        let aug = build_augmented(&pr).unwrap();
        assert_eq!(aug.c_hat.entries(), &array![[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(aug.p_hat, array![1.0, 1.0]);
        assert_eq!(aug.q_hat, array![1.0, 1.0]);

        let pr = ptv_problem(
            array![[0.0, 1.0]],
            array![1.0],
            array![1.0, 1.0],
            array![0.0],
            array![100.0, 100.0],
        );
        let aug = build_augmented(&pr).unwrap();
        assert_eq!(
            aug.c_hat.entries(),
            &array![[-100.0, -99.0, 0.0], [0.0, 0.0, 0.0]]
        );
        assert_eq!(aug.p_hat, array![1.0, 2.0]);
        assert_eq!(aug.q_hat, array![1.0, 1.0, 1.0]);

        let c = array![[1.0, 2.0], [3.0, 4.0]];
        let pr = ptv_problem(
            c.clone(),
            array![1.0, 1.0],
            array![1.0, 1.0],
            array![0.0, 0.0],
            array![0.0, 0.0],
        );
        let aug = build_augmented(&pr).unwrap();
        assert_eq!(aug.c_hat.entries().slice(s![..2, ..2]), c);
        assert!(aug.c_hat.entries().row(2).iter().all(|v| *v == 0.0));
        assert!(aug.c_hat.entries().column(2).iter().all(|v| *v == 0.0));
        assert_eq!(aug.p_hat.sum(), aug.q_hat.sum());
    }

    #[test]
    fn augmented_rejects_tv() {
        let mut pr = ptv_problem(
            array![[3.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
        );
        pr.penalty2 = PenaltyKind::Tv;
        assert!(matches!(
            build_augmented(&pr),
            Err(GoptError::Unsupported(_))
        ));
        assert!(matches!(solve_gopt_lp(&pr), Err(GoptError::Unsupported(_))));
    }

    #[test]
    fn destroy_versus_transport() {
        // transporting costs 3, destroying both unit masses costs 2 lambda
        let cheap = ptv_problem(
            array![[3.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
        );
        let r = solve_gopt_lp(&cheap).unwrap();
        assert_eq!(r.plan.matrix()[[0, 0]], 0.0);
        assert_abs_diff_eq!(r.objective.total, 2.0);
        assert_abs_diff_eq!(r.gap.unwrap(), 0.0, epsilon = 1e-12);

        let dear = ptv_problem(
            array![[3.0]],
            array![1.0],
            array![1.0],
            array![2.0],
            array![2.0],
        );
        let r = solve_gopt_lp(&dear).unwrap();
        assert_eq!(r.plan.matrix()[[0, 0]], 1.0);
        assert_abs_diff_eq!(r.objective.total, 3.0);
    }

    #[test]
    fn augment_plan_is_the_inverse_of_extraction() {
        let pr = ptv_problem(
            array![[0.3, 2.0], [1.5, 0.2]],
            array![1.0, 0.7],
            array![0.4, 1.1],
            array![1.0, 1.0],
            array![1.0, 1.0],
        );
        let aug = build_augmented(&pr).unwrap();
        let balanced = aug.balanced().unwrap();
        let sol = solve_balanced_ot(&balanced).unwrap();
        let block = sol.plan.slice(s![..2, ..2]).to_owned();
        let rebuilt = augment_plan(&block, pr.p.weights(), pr.q.weights());
        let value = (aug.c_hat.entries() * &rebuilt).sum();
        assert_abs_diff_eq!(value, sol.value, epsilon = 1e-12);
        for (a, b) in rebuilt.sum_axis(ndarray::Axis(1)).iter().zip(&aug.p_hat) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        for (a, b) in rebuilt.sum_axis(ndarray::Axis(0)).iter().zip(&aug.q_hat) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn support_pruning_examples() {
        let pr = ptv_problem(
            array![[3.0, 0.0]],
            array![1.0],
            array![1.0, 1.0],
            array![1.0],
            array![1.0, 1.0],
        );
        let r = solve_gopt_lp(&pr).unwrap();
        assert!(check_support_pruning(&pr, &r.plan, 1e-6));
        // c_hat[0][0] = 3 - 1 - 1 = +1 > 0
        let bad = TransportPlan::new(array![[1.0, 0.0]]).unwrap();
        assert!(!check_support_pruning(&pr, &bad, 1e-6));
        assert!(check_support_pruning(
            &pr,
            &TransportPlan::zeros(1, 2),
            1e-6
        ));
    }

    #[test]
    fn sopt_examples() {
        let r = solve_sopt(
            &CostMatrix::new(array![[7.0]]).unwrap(),
            &DiscreteMeasure::new(array![2.0]).unwrap(),
            &DiscreteMeasure::new(array![1.0]).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.plan.matrix()[[0, 0]], 1.0);
        assert_abs_diff_eq!(r.objective.transport, 7.0);
        assert_abs_diff_eq!(r.gap.unwrap(), 0.0, epsilon = 1e-9);

        let r = solve_sopt(
            &CostMatrix::new(array![[0.0], [5.0]]).unwrap(),
            &DiscreteMeasure::new(array![1.0, 1.0]).unwrap(),
            &DiscreteMeasure::new(array![1.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(r.plan.matrix(), &array![[1.0], [0.0]]);
        assert_eq!(r.objective.transport, 0.0);

        let err = solve_sopt(
            &CostMatrix::new(array![[1.0]]).unwrap(),
            &DiscreteMeasure::new(array![1.0]).unwrap(),
            &DiscreteMeasure::new(array![2.0]).unwrap(),
        );
        assert!(err.is_err());
    }
}
