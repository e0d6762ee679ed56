//! Entropic GOPT by alternating proximal-divide (scaling) updates.
//!
//! The scalings `u = exp(phi / eps)` and `v = exp(psi / eps)` are never
//! materialized inside the solver loop. Every update is carried out on the
//! potentials with log-sum-exp reductions, which is the limit of absorbing
//! the scalings into a stabilized kernel after every step. The scaling-domain
//! operators are still exposed (`proxdiv_*`) for callers that work with an
//! explicit kernel.

use ndarray::{Array1, Array2, Zip};

use crate::error::{GoptError, Result};
use crate::logsum::log_sum_exp;
use crate::measures::{
    side_penalty, CostMatrix, GoptProblem, ObjectiveTerms, PenaltyKind, TransportPlan,
    FEASIBILITY_TOL,
};
use crate::report::SolveReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicConfig {
    /// Entropic regularization strength, `> 0`.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop once the max-norm change of `(phi, psi)` over one sweep drops
    /// below this value.
    pub tol: f64,
    /// Record the duality gap every this many sweeps.
    pub gap_check_every: usize,
    /// Feasibility band used for PTV / equality indicators when scoring.
    pub feasibility_tol: f64,
    /// Warm-start from a geometric ladder of larger epsilons, each four
    /// times the next, starting at the largest cost. All sweeps count
    /// against `max_iters`.
    pub epsilon_scaling: bool,
}

impl Default for EntropicConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_iters: 10_000,
            tol: 1e-9,
            gap_check_every: 100,
            feasibility_tol: FEASIBILITY_TOL,
            epsilon_scaling: true,
        }
    }
}

impl EntropicConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(GoptError::InvalidInput(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(GoptError::InvalidInput(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 || self.gap_check_every == 0 {
            return Err(GoptError::InvalidInput(
                "max_iters and gap_check_every must be positive".into(),
            ));
        }
        if self.feasibility_tol.is_nan() || self.feasibility_tol < 0.0 {
            return Err(GoptError::InvalidInput(
                "feasibility_tol must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Dual potentials `(phi, psi)` at regularization `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials {
    pub phi: Array1<f64>,
    pub psi: Array1<f64>,
    pub epsilon: f64,
}

impl DualPotentials {
    /// `(u, v) = (exp(phi / eps), exp(psi / eps))`. May overflow for small
    /// `epsilon`; the solver itself never needs these.
    pub fn scalings(&self) -> (Array1<f64>, Array1<f64>) {
        let eps = self.epsilon;
        (
            self.phi.mapv(|x| (x / eps).exp()),
            self.psi.mapv(|x| (x / eps).exp()),
        )
    }

    /// `gamma_ij = exp((phi_i + psi_j - c_ij) / eps)`.
    pub fn plan(&self, cost: &Array2<f64>) -> Array2<f64> {
        Array2::from_shape_fn(cost.dim(), |(i, j)| {
            ((self.phi[i] + self.psi[j] - cost[[i, j]]) / self.epsilon).exp()
        })
    }
}

/// `K = exp(-c / eps)`.
pub fn gibbs_kernel(cost: &CostMatrix, epsilon: f64) -> Result<Array2<f64>> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(cost.entries().mapv(|c| (-c / epsilon).exp()))
}

fn check_proxdiv_inputs(target: &Array1<f64>, image: &Array1<f64>) -> Result<()> {
    if target.len() != image.len() {
        return Err(GoptError::Dimension(format!(
            "target has {} entries, kernel image {}",
            target.len(),
            image.len()
        )));
    }
    if let Some(v) = image.iter().find(|v| v.is_nan() || **v <= 0.0) {
        return Err(GoptError::InvalidInput(format!(
            "kernel image entry {v} is not strictly positive"
        )));
    }
    Ok(())
}

/// TV scaling update: `clip(target / image, [exp(-lambda/eps), exp(lambda/eps)])`.
pub fn proxdiv_tv(
    target: &Array1<f64>,
    image: &Array1<f64>,
    lambda: &Array1<f64>,
    epsilon: f64,
) -> Result<Array1<f64>> {
    check_proxdiv_inputs(target, image)?;
    if lambda.len() != target.len() {
        return Err(GoptError::Dimension("lambda length".into()));
    }
    Ok(Zip::from(target)
        .and(image)
        .and(lambda)
        .map_collect(|&t, &k, &l| {
            let bound = (l / epsilon).exp();
            (t / k).clamp(1.0 / bound, bound)
        }))
}

/// PTV scaling update: `min(target / image, exp(lambda/eps))`.
pub fn proxdiv_ptv(
    target: &Array1<f64>,
    image: &Array1<f64>,
    lambda: &Array1<f64>,
    epsilon: f64,
) -> Result<Array1<f64>> {
    check_proxdiv_inputs(target, image)?;
    if lambda.len() != target.len() {
        return Err(GoptError::Dimension("lambda length".into()));
    }
    Ok(Zip::from(target)
        .and(image)
        .and(lambda)
        .map_collect(|&t, &k, &l| (t / k).min((l / epsilon).exp())))
}

/// Source update of the semi-constrained problem: `min(target / image, 1)`.
pub fn proxdiv_sopt_source(target: &Array1<f64>, image: &Array1<f64>) -> Result<Array1<f64>> {
    check_proxdiv_inputs(target, image)?;
    Ok(Zip::from(target)
        .and(image)
        .map_collect(|&t, &k| (t / k).min(1.0)))
}

/// Target update of the semi-constrained problem: `target / image`.
pub fn proxdiv_sopt_target(target: &Array1<f64>, image: &Array1<f64>) -> Result<Array1<f64>> {
    check_proxdiv_inputs(target, image)?;
    Ok(target / image)
}

/// A marginal update rule in the potential (log) domain, together with the
/// primal penalty and dual term it corresponds to.
pub trait ProxDiv {
    /// New potential of atom `i`, given `log_ratio = ln(target_i / image_i)`
    /// where `image_i` is the kernel applied to the opposite scaling.
    fn potential(&self, i: usize, log_ratio: f64, epsilon: f64) -> f64;

    /// Primal penalty of a plan marginal against the target measure.
    fn primal_penalty(&self, marginal: &Array1<f64>, target: &Array1<f64>, tol: f64) -> f64;

    /// Dual contribution of a potential vector; `-inf` outside the dual domain.
    fn dual_term(&self, potential: &Array1<f64>, target: &Array1<f64>, tol: f64) -> f64;
}

/// The built-in marginal rules.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalRule {
    Tv(Array1<f64>),
    Ptv(Array1<f64>),
    /// Hard equality `marginal = target` (the `lambda -> inf` limit).
    Equality,
}

impl MarginalRule {
    pub fn from_penalty(kind: PenaltyKind, lambda: &Array1<f64>) -> Self {
        match kind {
            PenaltyKind::Tv => MarginalRule::Tv(lambda.clone()),
            PenaltyKind::Ptv => MarginalRule::Ptv(lambda.clone()),
        }
    }
}

impl ProxDiv for MarginalRule {
    fn potential(&self, i: usize, log_ratio: f64, epsilon: f64) -> f64 {
        let free = epsilon * log_ratio;
        match self {
            MarginalRule::Tv(lambda) => free.clamp(-lambda[i], lambda[i]),
            MarginalRule::Ptv(lambda) => free.min(lambda[i]),
            MarginalRule::Equality => free,
        }
    }

    fn primal_penalty(&self, marginal: &Array1<f64>, target: &Array1<f64>, tol: f64) -> f64 {
        match self {
            MarginalRule::Tv(lambda) => {
                side_penalty(PenaltyKind::Tv, lambda, marginal, target, tol)
            }
            MarginalRule::Ptv(lambda) => {
                side_penalty(PenaltyKind::Ptv, lambda, marginal, target, tol)
            }
            MarginalRule::Equality => {
                let violated = marginal
                    .iter()
                    .zip(target)
                    .any(|(a, b)| (a - b).abs() > tol);
                if violated {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    fn dual_term(&self, potential: &Array1<f64>, target: &Array1<f64>, tol: f64) -> f64 {
        match self {
            // The TV conjugate is finite only on potential >= -lambda.
            MarginalRule::Tv(lambda) => {
                let mut total = 0.0;
                for ((&f, &l), &t) in potential.iter().zip(lambda).zip(target) {
                    if f < -l - tol * (1.0 + l) {
                        return f64::NEG_INFINITY;
                    }
                    total += f.min(l) * t;
                }
                total
            }
            MarginalRule::Ptv(lambda) => potential
                .iter()
                .zip(lambda)
                .zip(target)
                .map(|((&f, &l), &t)| f.min(l) * t)
                .sum(),
            MarginalRule::Equality => potential.dot(target),
        }
    }
}

/// Raw output of the entropic loop, before it is packaged as a report.
#[derive(Debug, Clone)]
pub struct EntropicSolution {
    pub plan: TransportPlan,
    pub potentials: DualPotentials,
    pub objective: ObjectiveTerms,
    pub primal_value: f64,
    pub dual_value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gap_history: Vec<(usize, f64)>,
}

impl EntropicSolution {
    pub fn into_report(self, solver: &'static str) -> SolveReport {
        SolveReport {
            solver,
            plan: self.plan,
            objective: self.objective,
            primal_value: self.primal_value,
            dual_value: Some(self.dual_value),
            gap: Some(self.primal_value - self.dual_value),
            potentials: Some(self.potentials),
            iterations: self.iterations,
            converged: self.converged,
            gap_history: self.gap_history,
        }
    }
}

fn log_image_rows(cost: &Array2<f64>, psi: &Array1<f64>, eps: f64, out: &mut Array1<f64>) {
    for (i, row) in cost.outer_iter().enumerate() {
        out[i] = log_sum_exp(row.iter().zip(psi).map(|(&c, &s)| (s - c) / eps));
    }
}

fn log_image_cols(cost: &Array2<f64>, phi: &Array1<f64>, eps: f64, out: &mut Array1<f64>) {
    for (j, col) in cost.columns().into_iter().enumerate() {
        out[j] = log_sum_exp(col.iter().zip(phi).map(|(&c, &f)| (f - c) / eps));
    }
}

struct Scores {
    plan: Array2<f64>,
    objective: ObjectiveTerms,
    primal: f64,
    dual: f64,
}

fn score<R1, R2>(
    cost: &Array2<f64>,
    p: &Array1<f64>,
    q: &Array1<f64>,
    source: &R1,
    target: &R2,
    potentials: &DualPotentials,
    feasibility_tol: f64,
) -> Scores
where
    R1: ProxDiv + ?Sized,
    R2: ProxDiv + ?Sized,
{
    let eps = potentials.epsilon;
    let (phi, psi) = (&potentials.phi, &potentials.psi);
    let mut plan = Array2::zeros(cost.dim());
    let mut transport = 0.0;
    let mut entropy = 0.0;
    let mut kernel_minus_plan = 0.0;
    for ((i, j), &c) in cost.indexed_iter() {
        let log_plan = (phi[i] + psi[j] - c) / eps;
        let g = log_plan.exp();
        let k = (-c / eps).exp();
        plan[[i, j]] = g;
        transport += c * g;
        if g > 0.0 {
            entropy += g * (log_plan - 1.0);
        }
        entropy += k;
        kernel_minus_plan += k - g;
    }
    let rows = plan.sum_axis(ndarray::Axis(1));
    let cols = plan.sum_axis(ndarray::Axis(0));
    let pen1 = source.primal_penalty(&rows, p, feasibility_tol);
    let pen2 = target.primal_penalty(&cols, q, feasibility_tol);
    let objective = ObjectiveTerms::new(transport, pen1, pen2);
    // eps * KL(gamma || K) = <c, gamma> + eps * sum(gamma (ln gamma - 1) + K)
    let primal = objective.total + eps * entropy;
    let dual = eps * kernel_minus_plan
        + source.dual_term(phi, p, feasibility_tol)
        + target.dual_term(psi, q, feasibility_tol);
    Scores {
        plan,
        objective,
        primal,
        dual,
    }
}

/// Alternating scaling loop for arbitrary marginal rules. Starts from
/// `psi = 0` (i.e. `v = 1`) and updates `phi` then `psi` each sweep.
///
/// Converged means the last sweep moved no potential by more than `tol`
/// and the resulting plan satisfies every hard marginal constraint within
/// `feasibility_tol`.
pub fn solve_with_rules<R1, R2>(
    cost: &CostMatrix,
    p: &Array1<f64>,
    q: &Array1<f64>,
    source: &R1,
    target: &R2,
    config: &EntropicConfig,
) -> Result<EntropicSolution>
where
    R1: ProxDiv + ?Sized,
    R2: ProxDiv + ?Sized,
{
    config.validate()?;
    let c = cost.entries();
    let (n, m) = c.dim();
    if p.len() != n || q.len() != m {
        return Err(GoptError::Dimension(format!(
            "cost is {n}x{m}, marginals have {} and {} entries",
            p.len(),
            q.len()
        )));
    }
    let eps = config.epsilon;
    let mut sweeper = Sweeper {
        cost: c,
        log_p: p.mapv(f64::ln),
        log_q: q.mapv(f64::ln),
        phi: Array1::zeros(n),
        psi: Array1::zeros(m),
        image_rows: Array1::zeros(n),
        image_cols: Array1::zeros(m),
    };
    let mut iterations = 0;

    if config.epsilon_scaling {
        let mut ladder = Vec::new();
        let mut stage = eps * 4.0;
        while stage < cost.max() {
            ladder.push(stage);
            stage *= 4.0;
        }
        for &stage in ladder.iter().rev() {
            let stage_tol = (1e-3 * stage).max(config.tol);
            while iterations < config.max_iters {
                iterations += 1;
                if sweeper.sweep(source, target, stage)? < stage_tol {
                    break;
                }
            }
        }
    }

    let mut converged = false;
    let mut gap_history = Vec::new();
    while iterations < config.max_iters {
        iterations += 1;
        let delta = sweeper.sweep(source, target, eps)?;
        if delta < config.tol {
            let pots = sweeper.potentials(eps);
            let s = score(c, p, q, source, target, &pots, config.feasibility_tol);
            if s.primal.is_finite() {
                converged = true;
                break;
            }
        }
        if iterations % config.gap_check_every == 0 {
            let pots = sweeper.potentials(eps);
            let s = score(c, p, q, source, target, &pots, config.feasibility_tol);
            gap_history.push((iterations, s.primal - s.dual));
        }
    }

    let potentials = sweeper.potentials(eps);
    let s = score(c, p, q, source, target, &potentials, config.feasibility_tol);
    Ok(EntropicSolution {
        plan: TransportPlan::new(s.plan)?,
        potentials,
        objective: s.objective,
        primal_value: s.primal,
        dual_value: s.dual,
        iterations,
        converged,
        gap_history,
    })
}

struct Sweeper<'a> {
    cost: &'a Array2<f64>,
    log_p: Array1<f64>,
    log_q: Array1<f64>,
    phi: Array1<f64>,
    psi: Array1<f64>,
    image_rows: Array1<f64>,
    image_cols: Array1<f64>,
}

impl Sweeper<'_> {
    /// One `phi` update followed by one `psi` update; returns the max-norm
    /// change of the potentials.
    fn sweep<R1, R2>(&mut self, source: &R1, target: &R2, eps: f64) -> Result<f64>
    where
        R1: ProxDiv + ?Sized,
        R2: ProxDiv + ?Sized,
    {
        let mut delta: f64 = 0.0;
        log_image_rows(self.cost, &self.psi, eps, &mut self.image_rows);
        for i in 0..self.phi.len() {
            let new = source.potential(i, self.log_p[i] - self.image_rows[i], eps);
            delta = delta.max((new - self.phi[i]).abs());
            self.phi[i] = new;
        }
        log_image_cols(self.cost, &self.phi, eps, &mut self.image_cols);
        for j in 0..self.psi.len() {
            let new = target.potential(j, self.log_q[j] - self.image_cols[j], eps);
            delta = delta.max((new - self.psi[j]).abs());
            self.psi[j] = new;
        }
        if !delta.is_finite() {
            return Err(GoptError::InvalidInput(
                "potentials diverged; check for atoms with no finite-cost partner".into(),
            ));
        }
        Ok(delta)
    }

    fn potentials(&self, epsilon: f64) -> DualPotentials {
        DualPotentials {
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            epsilon,
        }
    }
}

/// Entropic GOPT with the update rule of each side chosen by its penalty kind.
pub fn solve_egopt(problem: &GoptProblem, config: &EntropicConfig) -> Result<SolveReport> {
    let source = MarginalRule::from_penalty(problem.penalty1, &problem.lambda1);
    let target = MarginalRule::from_penalty(problem.penalty2, &problem.lambda2);
    let sol = solve_with_rules(
        &problem.cost,
        problem.p.weights(),
        problem.q.weights(),
        &source,
        &target,
        config,
    )?;
    Ok(sol.into_report("sinkhorn"))
}

/// Entropic semi-constrained transport: source marginal `<= p`, target
/// marginal `= q`. Requires `sum q <= sum p`.
pub fn solve_esopt(
    cost: &CostMatrix,
    p: &Array1<f64>,
    q: &Array1<f64>,
    config: &EntropicConfig,
) -> Result<SolveReport> {
    if q.sum() > p.sum() * (1.0 + 1e-12) {
        return Err(GoptError::InvalidInput(format!(
            "target mass {} exceeds source mass {}",
            q.sum(),
            p.sum()
        )));
    }
    let source = MarginalRule::Ptv(Array1::zeros(p.len()));
    let sol = solve_with_rules(cost, p, q, &source, &MarginalRule::Equality, config)?;
    Ok(sol.into_report("sopt-sinkhorn"))
}

/// Entropic dual objective in scaling-free form:
/// `-eps sum (exp((phi_i + psi_j)/eps) - 1) K_ij + side terms`.
pub fn dual_objective(
    problem: &GoptProblem,
    potentials: &DualPotentials,
    kernel: &Array2<f64>,
    tol: f64,
) -> Result<f64> {
    let (n, m) = kernel.dim();
    if n != problem.n() || m != problem.m() {
        return Err(GoptError::Dimension("kernel shape".into()));
    }
    if potentials.phi.len() != n || potentials.psi.len() != m {
        return Err(GoptError::Dimension("potential lengths".into()));
    }
    let eps = potentials.epsilon;
    let mut mass_term = 0.0;
    for ((i, j), &k) in kernel.indexed_iter() {
        let s = (potentials.phi[i] + potentials.psi[j]) / eps;
        mass_term += s.exp_m1() * k;
    }
    let source = MarginalRule::from_penalty(problem.penalty1, &problem.lambda1);
    let target = MarginalRule::from_penalty(problem.penalty2, &problem.lambda2);
    Ok(-eps * mass_term
        + source.dual_term(&potentials.phi, problem.p.weights(), tol)
        + target.dual_term(&potentials.psi, problem.q.weights(), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DiscreteMeasure;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn problem(
        cost: Array2<f64>,
        p: Array1<f64>,
        q: Array1<f64>,
        l1: Array1<f64>,
        l2: Array1<f64>,
        kind: PenaltyKind,
    ) -> GoptProblem {
        GoptProblem::new(
            CostMatrix::new(cost).unwrap(),
            DiscreteMeasure::new(p).unwrap(),
            DiscreteMeasure::new(q).unwrap(),
            l1,
            l2,
            kind,
            kind,
        )
        .unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = gibbs_kernel(&CostMatrix::new(array![[0.0]]).unwrap(), 1.0).unwrap();
        assert_eq!(k[[0, 0]], 1.0);
        let k = gibbs_kernel(&CostMatrix::new(array![[1.0]]).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(k[[0, 0]], (-1f64).exp());
        let k = gibbs_kernel(&CostMatrix::new(array![[2.0]]).unwrap(), 2.0).unwrap();
        assert_abs_diff_eq!(k[[0, 0]], (-1f64).exp());
        assert!(gibbs_kernel(&CostMatrix::new(array![[2.0]]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn tv_proxdiv_examples() {
        let u = proxdiv_tv(&array![1.0], &array![2.0], &array![0.0], 1.0).unwrap();
        assert_eq!(u, array![1.0]);
        let u = proxdiv_tv(&array![1.0], &array![2.0], &array![10.0], 1.0).unwrap();
        assert_eq!(u, array![0.5]);
        let u = proxdiv_tv(&array![8.0], &array![1.0], &array![2f64.ln()], 1.0).unwrap();
        assert_abs_diff_eq!(u[0], 2.0, epsilon = 1e-14);
        assert!(proxdiv_tv(&array![1.0], &array![0.0], &array![1.0], 1.0).is_err());
    }

    #[test]
    fn tv_proxdiv_maximizes_the_one_dimensional_dual() {
        // maximize -eps e^{phi/eps} image + min(phi, lambda) target over phi >= -lambda
        let (target, image, lambda, eps) = (8.0, 1.0, 2f64.ln(), 1.0);
        let objective = |phi: f64| -eps * (phi / eps).exp() * image + phi.min(lambda) * target;
        let best = (0..=200_000)
            .map(|k| -lambda + 2.0 * lambda * k as f64 / 200_000.0)
            .max_by(|a, b| objective(*a).total_cmp(&objective(*b)))
            .unwrap();
        let u = proxdiv_tv(&array![target], &array![image], &array![lambda], eps).unwrap();
        assert_abs_diff_eq!((best / eps).exp(), u[0], epsilon = 1e-4);
    }

    #[test]
    fn ptv_and_sopt_proxdiv_examples() {
        assert_eq!(
            proxdiv_ptv(&array![1.0], &array![2.0], &array![0.0], 1.0).unwrap(),
            array![0.5]
        );
        let u = proxdiv_ptv(&array![8.0], &array![1.0], &array![2f64.ln()], 1.0).unwrap();
        assert_abs_diff_eq!(u[0], 2.0, epsilon = 1e-14);
        assert_eq!(
            proxdiv_ptv(&array![1.0], &array![1.0], &array![1e6], 1.0).unwrap(),
            array![1.0]
        );

        assert_eq!(
            proxdiv_sopt_source(&array![2.0], &array![1.0]).unwrap(),
            array![1.0]
        );
        assert_eq!(
            proxdiv_sopt_source(&array![0.5], &array![1.0]).unwrap(),
            array![0.5]
        );
        assert_eq!(
            proxdiv_sopt_source(&array![1.0], &array![1.0]).unwrap(),
            array![1.0]
        );

        assert_eq!(
            proxdiv_sopt_target(&array![1.0], &array![1.0]).unwrap(),
            array![1.0]
        );
        assert_eq!(
            proxdiv_sopt_target(&array![3.0], &array![2.0]).unwrap(),
            array![1.5]
        );
        assert_eq!(
            proxdiv_sopt_target(&array![1.0, 2.0], &array![2.0, 4.0]).unwrap(),
            array![0.5, 0.5]
        );
    }

    #[test]
    fn log_rules_agree_with_scaling_rules() {
        let target = array![0.3, 2.0, 5.0];
        let image = array![1.7, 0.2, 5.0];
        let lambda = array![0.1, 0.7, 3.0];
        let eps = 0.25;
        let tv = proxdiv_tv(&target, &image, &lambda, eps).unwrap();
        let ptv = proxdiv_ptv(&target, &image, &lambda, eps).unwrap();
        for i in 0..3 {
            let lr = (target[i] / image[i] as f64).ln();
            let a = MarginalRule::Tv(lambda.clone()).potential(i, lr, eps);
            let b = MarginalRule::Ptv(lambda.clone()).potential(i, lr, eps);
            assert_abs_diff_eq!((a / eps).exp(), tv[i], epsilon = 1e-12);
            assert_abs_diff_eq!((b / eps).exp(), ptv[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn dual_objective_examples() {
        let pr = problem(
            array![[0.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
            PenaltyKind::Tv,
        );
        let pots = DualPotentials {
            phi: array![0.0],
            psi: array![0.0],
            epsilon: 1.0,
        };
        assert_eq!(
            dual_objective(&pr, &pots, &array![[1.0]], 1e-9).unwrap(),
            0.0
        );

        let pr = problem(
            array![[0.0]],
            array![1.0],
            array![1.0],
            array![10.0],
            array![10.0],
            PenaltyKind::Tv,
        );
        let pots = DualPotentials {
            phi: array![0.5],
            psi: array![0.5],
            epsilon: 1.0,
        };
        let d = dual_objective(&pr, &pots, &array![[1.0]], 1e-9).unwrap();
        assert_abs_diff_eq!(d, 2.0 - std::f64::consts::E, epsilon = 1e-14);
    }

    #[test]
    fn dual_domain_restriction_sits_on_the_tv_side() {
        let tv = problem(
            array![[0.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
            PenaltyKind::Tv,
        );
        let pots = DualPotentials {
            phi: array![-2.0],
            psi: array![0.0],
            epsilon: 1.0,
        };
        let k = array![[1.0]];
        assert_eq!(
            dual_objective(&tv, &pots, &k, 1e-9).unwrap(),
            f64::NEG_INFINITY
        );

        let mut ptv = tv.clone();
        ptv.penalty1 = PenaltyKind::Ptv;
        ptv.penalty2 = PenaltyKind::Ptv;
        // -(e^{-2} - 1) + min(1, -2) * 1 + 0
        let d = dual_objective(&ptv, &pots, &k, 1e-9).unwrap();
        assert_abs_diff_eq!(d, 1.0 - (-2f64).exp() - 2.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_cost_unit_transport() {
        let pr = problem(
            array![[0.0]],
            array![1.0],
            array![1.0],
            array![10.0],
            array![10.0],
            PenaltyKind::Tv,
        );
        let r = solve_egopt(&pr, &EntropicConfig::with_epsilon(0.1)).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.plan.matrix()[[0, 0]], 1.0, epsilon = 1e-8);
        assert!(r.gap.unwrap().abs() <= 1e-6);
        assert_abs_diff_eq!(r.objective.total, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn expensive_transport_is_destroyed_under_ptv() {
        let pr = problem(
            array![[5.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
            PenaltyKind::Ptv,
        );
        let r = solve_egopt(&pr, &EntropicConfig::with_epsilon(0.05)).unwrap();
        assert!(r.converged);
        assert!(r.plan.matrix()[[0, 0]] < 1e-12);
        assert_abs_diff_eq!(r.objective.total, 2.0, epsilon = 1e-9);
        // converged PTV potentials sit at the cap
        assert_abs_diff_eq!(r.potentials.as_ref().unwrap().phi[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn plan_factorizes_through_scalings() {
        let pr = problem(
            array![[0.2, 1.0], [0.7, 0.1]],
            array![1.0, 0.5],
            array![0.6, 1.2],
            array![0.8, 0.3],
            array![1.5, 0.4],
            PenaltyKind::Tv,
        );
        let r = solve_egopt(&pr, &EntropicConfig::with_epsilon(0.5)).unwrap();
        let pots = r.potentials.as_ref().unwrap();
        let (u, v) = pots.scalings();
        let k = gibbs_kernel(&pr.cost, 0.5).unwrap();
        for ((i, j), &g) in r.plan.matrix().indexed_iter() {
            let expected = u[i] * k[[i, j]] * v[j];
            assert!((g - expected).abs() <= 1e-10 * expected);
        }
        let d = dual_objective(&pr, pots, &k, 1e-9).unwrap();
        assert_abs_diff_eq!(d, r.dual_value.unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let pr = problem(
            array![[0.0]],
            array![1.0],
            array![1.0],
            array![1.0],
            array![1.0],
            PenaltyKind::Tv,
        );
        let bad = EntropicConfig {
            epsilon: -1.0,
            ..EntropicConfig::default()
        };
        assert!(solve_egopt(&pr, &bad).is_err());
        let bad = EntropicConfig {
            tol: 0.0,
            ..EntropicConfig::default()
        };
        assert!(solve_egopt(&pr, &bad).is_err());
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let pr = problem(
            array![[0.0, 3.0], [3.0, 0.0]],
            array![1.0, 2.0],
            array![2.0, 1.0],
            array![5.0, 5.0],
            array![5.0, 5.0],
            PenaltyKind::Ptv,
        );
        let cfg = EntropicConfig {
            max_iters: 2,
            ..EntropicConfig::with_epsilon(0.01)
        };
        let r = solve_egopt(&pr, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }
}
