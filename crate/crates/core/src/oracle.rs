//! Ground truth for the other solvers: explicit LP formulations of every
//! problem in the crate, a dense two-phase tableau simplex with Bland's
//! rule, and brute-force vertex enumeration for tiny instances.
//!
//! Nothing here is fast. It is meant to be obviously correct.

use ndarray::{Array1, Array2};

use crate::error::{GoptError, LpStatus, Result};
use crate::measures::{
    gopt_primal_objective, CostMatrix, DiscreteMeasure, GoptProblem, PenaltyKind, TransportPlan,
};
use crate::mopt::MoptProblem;
use crate::report::SolveReport;

const PIVOT_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

/// `min objective . x + objective_offset` subject to `eq_rows x = eq_rhs`,
/// `ub_rows x <= ub_rhs`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseLp {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_rows: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
}

impl DenseLp {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.num_vars());
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_ub(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.num_vars());
        self.ub_rows.push(row);
        self.ub_rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let rows_ok = self
            .eq_rows
            .iter()
            .chain(&self.ub_rows)
            .all(|r| r.len() == n);
        if !rows_ok
            || self.eq_rows.len() != self.eq_rhs.len()
            || self.ub_rows.len() != self.ub_rhs.len()
        {
            return Err(GoptError::Dimension("LP row lengths".into()));
        }
        Ok(())
    }

    /// Equality form `A x = b, x >= 0` with one slack per inequality row,
    /// slacks appended after the original variables.
    fn standard_form(&self) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let n = self.num_vars();
        let slacks = self.ub_rows.len();
        let mut a = Vec::with_capacity(self.eq_rows.len() + slacks);
        let mut b = Vec::with_capacity(a.capacity());
        for (row, &rhs) in self.eq_rows.iter().zip(&self.eq_rhs) {
            let mut r = row.clone();
            r.resize(n + slacks, 0.0);
            a.push(r);
            b.push(rhs);
        }
        for (k, (row, &rhs)) in self.ub_rows.iter().zip(&self.ub_rhs).enumerate() {
            let mut r = row.clone();
            r.resize(n + slacks, 0.0);
            r[n + k] = 1.0;
            a.push(r);
            b.push(rhs);
        }
        let mut c = self.objective.clone();
        c.resize(n + slacks, 0.0);
        (a, b, c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

struct Tableau {
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize, cost: &mut [f64], value: &mut f64) {
        let w = self.cols + 1;
        let p = self.t[r][j];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[j];
                if f != 0.0 {
                    for k in 0..w {
                        row[k] -= f * pivot_row[k];
                    }
                }
            }
        }
        let f = cost[j];
        if f != 0.0 {
            for k in 0..self.cols {
                cost[k] -= f * pivot_row[k];
            }
            *value += f * pivot_row[self.cols];
        }
        self.basis[r] = j;
    }

    /// Bland's rule on reduced costs `cost`; columns at or beyond `allowed`
    /// never enter.
    fn optimize(&mut self, cost: &mut [f64], value: &mut f64, allowed: usize) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let Some(j) = (0..allowed).find(|&j| cost[j] < -PRICE_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (r, row) in self.t.iter().enumerate() {
                if row[j] > PIVOT_TOL {
                    let ratio = row[self.cols] / row[j];
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(GoptError::Lp(LpStatus::Unbounded));
            };
            self.pivot(r, j, cost, value);
        }
        Err(GoptError::Lp(LpStatus::IterationLimit))
    }
}

/// Two-phase dense simplex. Phase one minimizes the sum of one artificial
/// variable per row; phase two the real objective. Both use Bland's rule.
pub fn simplex_solve(lp: &DenseLp) -> Result<LpSolution> {
    lp.validate()?;
    let (a, mut b, c) = lp.standard_form();
    let rows = a.len();
    let structural = c.len();
    let cols = structural + rows;
    let mut t = Vec::with_capacity(rows);
    for (r, row) in a.iter().enumerate() {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        b[r] *= sign;
        let mut full: Vec<f64> = row.iter().map(|v| v * sign).collect();
        full.resize(cols + 1, 0.0);
        full[structural + r] = 1.0;
        full[cols] = b[r];
        t.push(full);
    }
    let mut tab = Tableau {
        t,
        basis: (structural..cols).collect(),
        cols,
    };

    // Phase one: reduced costs of sum(artificials) with the artificial basis.
    let mut cost1 = vec![0.0; cols];
    let mut value1 = 0.0;
    for row in &tab.t {
        for k in 0..structural {
            cost1[k] -= row[k];
        }
        value1 += row[cols];
    }
    tab.optimize(&mut cost1, &mut value1, structural)?;
    let infeasibility = value1;
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeasibility > 1e-8 * scale {
        return Err(GoptError::Lp(LpStatus::Infeasible));
    }

    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= structural {
            let entering = (0..structural).find(|&j| tab.t[r][j].abs() > PIVOT_TOL);
            match entering {
                Some(j) => {
                    let mut dummy = vec![0.0; cols];
                    let mut dv = 0.0;
                    tab.pivot(r, j, &mut dummy, &mut dv);
                    r += 1;
                }
                None => {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase two.
    let mut cost2 = vec![0.0; cols];
    cost2[..structural].copy_from_slice(&c);
    let mut value2 = 0.0;
    for (row, &bj) in tab.t.iter().zip(&tab.basis) {
        let f = cost2[bj];
        if f != 0.0 {
            for k in 0..cols {
                cost2[k] -= f * row[k];
            }
            value2 += f * row[cols];
        }
    }
    tab.optimize(&mut cost2, &mut value2, structural)?;

    let mut x = vec![0.0; lp.num_vars()];
    for (row, &bj) in tab.t.iter().zip(&tab.basis) {
        if bj < lp.num_vars() {
            x[bj] = row[cols].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>() + lp.objective_offset;
    Ok(LpSolution { x, value })
}

/// Solve `A x = b` for square `A` by Gaussian elimination with partial
/// pivoting; `None` if singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(r);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Keep a maximal linearly independent subset of the rows of `[A | b]`.
fn independent_rows(a: &[Vec<f64>], b: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut kept_a: Vec<Vec<f64>> = Vec::new();
    let mut kept_b = Vec::new();
    let mut reduced: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for (row, &rhs) in a.iter().zip(b) {
        let mut v: Vec<f64> = row.iter().copied().chain(std::iter::once(rhs)).collect();
        for (red, &pc) in reduced.iter().zip(&pivots) {
            let f = v[pc] / red[pc];
            if f != 0.0 {
                for (x, y) in v.iter_mut().zip(red) {
                    *x -= f * y;
                }
            }
        }
        let lead = (0..row.len()).find(|&k| v[k].abs() > 1e-10);
        if let Some(pc) = lead {
            reduced.push(v);
            pivots.push(pc);
            kept_a.push(row.clone());
            kept_b.push(rhs);
        }
    }
    (kept_a, kept_b)
}

/// Exhaustive search over basic feasible solutions. Only for tiny LPs: the
/// number of candidate bases is capped at one million.
pub fn enumerate_vertices(lp: &DenseLp) -> Result<LpSolution> {
    lp.validate()?;
    let (a, b, c) = lp.standard_form();
    let (a, b) = independent_rows(&a, &b);
    let rows = a.len();
    let cols = c.len();
    let mut combos: f64 = 1.0;
    for k in 0..rows {
        combos *= (cols - k) as f64 / (k + 1) as f64;
    }
    if combos > 1e6 {
        return Err(GoptError::InvalidInput(format!(
            "{combos:.0} candidate bases is too many for enumeration"
        )));
    }
    let mut best: Option<LpSolution> = None;
    let mut idx: Vec<usize> = (0..rows).collect();
    loop {
        let square: Vec<Vec<f64>> = a
            .iter()
            .map(|r| idx.iter().map(|&k| r[k]).collect())
            .collect();
        if let Some(xb) = solve_square(square, b.clone()) {
            if xb.iter().all(|v| *v >= -1e-10) {
                let mut x = vec![0.0; cols];
                for (&k, &v) in idx.iter().zip(&xb) {
                    x[k] = v.max(0.0);
                }
                let value: f64 =
                    c.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>() + lp.objective_offset;
                if best.as_ref().is_none_or(|s| value < s.value) {
                    x.truncate(lp.num_vars());
                    best = Some(LpSolution { x, value });
                }
            }
        }
        // next combination
        let mut pos = rows;
        loop {
            if pos == 0 {
                return best.ok_or(GoptError::Lp(LpStatus::Infeasible));
            }
            pos -= 1;
            if idx[pos] < cols - rows + pos {
                break;
            }
        }
        idx[pos] += 1;
        for k in pos + 1..rows {
            idx[k] = idx[k - 1] + 1;
        }
        if rows == 0 {
            return best.ok_or(GoptError::Lp(LpStatus::Infeasible));
        }
    }
}

fn row_sum_row(n: usize, m: usize, i: usize, vars: usize) -> Vec<f64> {
    let mut r = vec![0.0; vars];
    for j in 0..m {
        r[i * m + j] = 1.0;
    }
    let _ = n;
    r
}

fn col_sum_row(n: usize, m: usize, j: usize, vars: usize) -> Vec<f64> {
    let mut r = vec![0.0; vars];
    for i in 0..n {
        r[i * m + j] = 1.0;
    }
    r
}

/// Explicit LP of a GOPT problem. Variables are the plan entries
/// (row-major), followed for each TV side by split deviations `s+`, `s-`
/// with `measure - marginal = s+ - s-`. PTV sides become `marginal <=
/// measure` with the linear deficit folded into the plan costs.
pub fn lp_from_gopt(problem: &GoptProblem) -> DenseLp {
    let (n, m) = (problem.n(), problem.m());
    let tv1 = problem.penalty1 == PenaltyKind::Tv;
    let tv2 = problem.penalty2 == PenaltyKind::Tv;
    let vars = n * m + if tv1 { 2 * n } else { 0 } + if tv2 { 2 * m } else { 0 };
    let mut lp = DenseLp::new(vars);
    let c = problem.cost.entries();
    let (p, q) = (problem.p.weights(), problem.q.weights());
    let (l1, l2) = (&problem.lambda1, &problem.lambda2);
    for i in 0..n {
        for j in 0..m {
            lp.objective[i * m + j] = c[[i, j]];
        }
    }
    let mut next = n * m;
    if tv1 {
        for i in 0..n {
            let mut row = row_sum_row(n, m, i, vars);
            row[next + i] = 1.0;
            row[next + n + i] = -1.0;
            lp.objective[next + i] = l1[i];
            lp.objective[next + n + i] = l1[i];
            lp.add_eq(row, p[i]);
        }
        next += 2 * n;
    } else {
        for i in 0..n {
            lp.add_ub(row_sum_row(n, m, i, vars), p[i]);
            for j in 0..m {
                lp.objective[i * m + j] -= l1[i];
            }
        }
        lp.objective_offset += l1.dot(p);
    }
    if tv2 {
        for j in 0..m {
            let mut row = col_sum_row(n, m, j, vars);
            row[next + j] = 1.0;
            row[next + m + j] = -1.0;
            lp.objective[next + j] = l2[j];
            lp.objective[next + m + j] = l2[j];
            lp.add_eq(row, q[j]);
        }
    } else {
        for j in 0..m {
            lp.add_ub(col_sum_row(n, m, j, vars), q[j]);
            for i in 0..n {
                lp.objective[i * m + j] -= l2[j];
            }
        }
        lp.objective_offset += l2.dot(q);
    }
    lp
}

/// `min <c, gamma>` over `rows <= p`, `cols <= q`, `sum = eta`.
pub fn lp_from_mopt(problem: &MoptProblem) -> DenseLp {
    let (n, m) = (problem.p.len(), problem.q.len());
    let vars = n * m;
    let mut lp = DenseLp::new(vars);
    lp.objective = problem.cost.entries().iter().copied().collect();
    for i in 0..n {
        lp.add_ub(row_sum_row(n, m, i, vars), problem.p.weights()[i]);
    }
    for j in 0..m {
        lp.add_ub(col_sum_row(n, m, j, vars), problem.q.weights()[j]);
    }
    lp.add_eq(vec![1.0; vars], problem.eta);
    lp
}

/// `min <c, gamma>` over `rows <= p`, `cols = q`.
pub fn lp_from_sopt(cost: &CostMatrix, p: &DiscreteMeasure, q: &DiscreteMeasure) -> DenseLp {
    let (n, m) = (p.len(), q.len());
    let vars = n * m;
    let mut lp = DenseLp::new(vars);
    lp.objective = cost.entries().iter().copied().collect();
    for i in 0..n {
        lp.add_ub(row_sum_row(n, m, i, vars), p.weights()[i]);
    }
    for j in 0..m {
        lp.add_eq(col_sum_row(n, m, j, vars), q.weights()[j]);
    }
    lp
}

/// Classical partial transport with one scalar price:
/// `min <c, gamma> + lambda (|p| - |gamma|) + lambda (|q| - |gamma|)`
/// over `rows <= p`, `cols <= q`.
pub fn lp_from_classical_opt(
    cost: &CostMatrix,
    p: &DiscreteMeasure,
    q: &DiscreteMeasure,
    lambda: f64,
) -> DenseLp {
    let (n, m) = (p.len(), q.len());
    let vars = n * m;
    let mut lp = DenseLp::new(vars);
    lp.objective = cost.entries().iter().map(|c| c - 2.0 * lambda).collect();
    lp.objective_offset = lambda * (p.mass() + q.mass());
    for i in 0..n {
        lp.add_ub(row_sum_row(n, m, i, vars), p.weights()[i]);
    }
    for j in 0..m {
        lp.add_ub(col_sum_row(n, m, j, vars), q.weights()[j]);
    }
    lp
}

/// The plan block (first `n * m` variables) of an LP solution.
pub fn plan_from_solution(n: usize, m: usize, x: &[f64]) -> Result<TransportPlan> {
    let block = Array2::from_shape_vec((n, m), x[..n * m].to_vec())
        .map_err(|e| GoptError::Dimension(e.to_string()))?;
    TransportPlan::new(block)
}

/// GOPT (TV or PTV) solved by the dense simplex.
pub fn solve_gopt_oracle(problem: &GoptProblem) -> Result<SolveReport> {
    let lp = lp_from_gopt(problem);
    let sol = simplex_solve(&lp)?;
    let plan = plan_from_solution(problem.n(), problem.m(), &sol.x)?;
    let objective = gopt_primal_objective(problem, &plan)?;
    Ok(SolveReport {
        solver: "oracle",
        plan,
        objective,
        potentials: None,
        primal_value: sol.value,
        dual_value: None,
        gap: None,
        iterations: 0,
        converged: true,
        gap_history: Vec::new(),
    })
}

/// Convenience: vector `[lambda; len]`.
pub fn constant(len: usize, value: f64) -> Array1<f64> {
    Array1::from_elem(len, value)
}
