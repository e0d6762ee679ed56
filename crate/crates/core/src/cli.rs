//! Command-line front end: JSON problem files in, JSON reports out.
//!
//! A problem file looks like
//!
//! ```json
//! {
//!   "version": "gopt/1",
//!   "source": { "weights": [1.0], "coords": [[0.0]] },
//!   "target": { "weights": [1.0, 1.0], "coords": [[0.0], [1.0]] },
//!   "cost_rule": "sq_euclidean",
//!   "lambda1": 0.0,
//!   "lambda2": [100.0, 100.0],
//!   "penalty1": "tv",
//!   "penalty2": "tv",
//!   "solver": "sinkhorn",
//!   "params": { "epsilon": 0.01 }
//! }
//! ```
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 solver rejection,
//! 3 non-convergence (the report is still written). `selftest` exits 4 on
//! any mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::GoptError;
use crate::exact_lp::{solve_gopt_lp, solve_sopt};
use crate::measures::{
    make_cost_sq_euclidean, CostMatrix, DiscreteMeasure, GoptProblem, PenaltyKind,
};
use crate::mopt::{solve_emopt_dykstra, solve_mopt_lp, MoptProblem};
use crate::oracle::solve_gopt_oracle;
use crate::report::SolveReport;
use crate::sinkhorn::{solve_egopt, EntropicConfig};

pub const FORMAT_VERSION: &str = "gopt/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_SELFTEST_FAILED: i32 = 4;

/// Plan entries at or below this are left out of reports.
pub const PLAN_THRESHOLD: f64 = 1e-12;

const DEFAULT_EPSILON: f64 = 0.01;
const DEFAULT_SINKHORN_TOL: f64 = 1e-9;
const DEFAULT_DYKSTRA_TOL: f64 = 1e-8;
const DEFAULT_SINKHORN_ITERS: usize = 10_000;
const DEFAULT_DYKSTRA_ITERS: usize = 50_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem: {0}")]
    Schema(String),
    #[error("{0}")]
    Rejected(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Rejected(_) => EXIT_REJECTED,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverName {
    Sinkhorn,
    Lp,
    MoptLp,
    MoptDykstra,
    Sopt,
    Oracle,
}

impl SolverName {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverName::Sinkhorn => "sinkhorn",
            SolverName::Lp => "lp",
            SolverName::MoptLp => "mopt-lp",
            SolverName::MoptDykstra => "mopt-dykstra",
            SolverName::Sopt => "sopt",
            SolverName::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyName {
    Tv,
    Ptv,
}

impl From<PenaltyName> for PenaltyKind {
    fn from(p: PenaltyName) -> Self {
        match p {
            PenaltyName::Tv => PenaltyKind::Tv,
            PenaltyName::Ptv => PenaltyKind::Ptv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostRule {
    SqEuclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl LambdaSpec {
    fn broadcast(&self, len: usize, field: &str) -> Result<Array1<f64>, CliError> {
        match self {
            LambdaSpec::Scalar(v) => Ok(Array1::from_elem(len, *v)),
            LambdaSpec::Vector(v) if v.len() == len => Ok(Array1::from(v.clone())),
            LambdaSpec::Vector(v) => Err(CliError::Schema(format!(
                "{field} has {} entries, expected {len}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: String,
    pub source: MeasureSpec,
    pub target: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_rule: Option<CostRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<LambdaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<LambdaSpec>,
    #[serde(default = "default_penalty")]
    pub penalty1: PenaltyName,
    #[serde(default = "default_penalty")]
    pub penalty2: PenaltyName,
    pub solver: SolverName,
    #[serde(default)]
    pub params: SolverParams,
}

fn default_penalty() -> PenaltyName {
    PenaltyName::Ptv
}

/// A validated problem, ready for a solver.
#[derive(Debug, Clone)]
pub enum Instance {
    Gopt(GoptProblem),
    Mopt {
        problem: MoptProblem,
        alpha: f64,
        beta: f64,
    },
    Sopt {
        cost: CostMatrix,
        p: DiscreteMeasure,
        q: DiscreteMeasure,
    },
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.version != FORMAT_VERSION {
        return Err(CliError::Schema(format!(
            "version: expected \"{FORMAT_VERSION}\", found \"{}\"",
            file.version
        )));
    }
    Ok(file)
}

fn schema(field: &str, err: GoptError) -> CliError {
    CliError::Schema(format!("{field}: {err}"))
}

fn build_measure(spec: &MeasureSpec, field: &str) -> Result<DiscreteMeasure, CliError> {
    let mut m = DiscreteMeasure::new(spec.weights.clone()).map_err(|e| schema(field, e))?;
    if let Some(coords) = &spec.coords {
        m = m
            .with_labels(coords.clone())
            .map_err(|e| schema(field, e))?;
    }
    Ok(m)
}

fn build_cost(file: &ProblemFile) -> Result<CostMatrix, CliError> {
    match (&file.cost, file.cost_rule) {
        (Some(_), Some(_)) => Err(CliError::Schema(
            "exactly one of `cost` and `cost_rule` may be given".into(),
        )),
        (None, None) => Err(CliError::Schema(
            "one of `cost` or `cost_rule` is required".into(),
        )),
        (Some(rows), None) => {
            if file.source.coords.is_some() || file.target.coords.is_some() {
                return Err(CliError::Schema(
                    "coords are only allowed together with `cost_rule`".into(),
                ));
            }
            let n = rows.len();
            let m = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != m) {
                return Err(CliError::Schema("cost: rows have different lengths".into()));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            let entries = Array2::from_shape_vec((n, m), flat)
                .map_err(|e| CliError::Schema(format!("cost: {e}")))?;
            CostMatrix::new(entries).map_err(|e| schema("cost", e))
        }
        (None, Some(CostRule::SqEuclidean)) => {
            let (Some(xs), Some(ys)) = (&file.source.coords, &file.target.coords) else {
                return Err(CliError::Schema(
                    "cost_rule requires `coords` on both source and target".into(),
                ));
            };
            make_cost_sq_euclidean(xs, ys).map_err(|e| schema("cost_rule", e))
        }
    }
}

impl ProblemFile {
    pub fn instance(&self, solver: SolverName) -> Result<Instance, CliError> {
        let p = build_measure(&self.source, "source")?;
        let q = build_measure(&self.target, "target")?;
        let cost = build_cost(self)?;
        if cost.nrows() != p.len() || cost.ncols() != q.len() {
            return Err(CliError::Schema(format!(
                "cost is {}x{} but source has {} and target {} atoms",
                cost.nrows(),
                cost.ncols(),
                p.len(),
                q.len()
            )));
        }
        match solver {
            SolverName::Sinkhorn | SolverName::Lp | SolverName::Oracle => {
                let l1 = self
                    .lambda1
                    .as_ref()
                    .ok_or_else(|| {
                        CliError::Schema(format!("lambda1 is required by {}", solver.as_str()))
                    })?
                    .broadcast(p.len(), "lambda1")?;
                let l2 = self
                    .lambda2
                    .as_ref()
                    .ok_or_else(|| {
                        CliError::Schema(format!("lambda2 is required by {}", solver.as_str()))
                    })?
                    .broadcast(q.len(), "lambda2")?;
                let problem = GoptProblem::new(
                    cost,
                    p,
                    q,
                    l1,
                    l2,
                    self.penalty1.into(),
                    self.penalty2.into(),
                )
                .map_err(|e| schema("problem", e))?;
                Ok(Instance::Gopt(problem))
            }
            SolverName::MoptLp | SolverName::MoptDykstra => {
                let eta = self.params.eta.ok_or_else(|| {
                    CliError::Schema("params.eta is required by MOPT solvers".into())
                })?;
                let problem =
                    MoptProblem::new(cost, p, q, eta).map_err(|e| schema("params.eta", e))?;
                Ok(Instance::Mopt {
                    problem,
                    alpha: self.params.alpha.unwrap_or(0.0),
                    beta: self.params.beta.unwrap_or(1.0),
                })
            }
            SolverName::Sopt => Ok(Instance::Sopt { cost, p, q }),
        }
    }
}

fn rejected(solver: SolverName, err: GoptError) -> CliError {
    let hint = match (&err, solver) {
        (GoptError::Unsupported(_), SolverName::Lp) => {
            "; use `sinkhorn` or `oracle` for problems with TV penalties"
        }
        (GoptError::Unbalanced { .. }, _) | (GoptError::InvalidInput(_), SolverName::Sopt) => {
            "; `sopt` needs target mass <= source mass, try `lp` or `sinkhorn`"
        }
        _ => "",
    };
    CliError::Rejected(format!(
        "solver `{}` rejected the problem: {err}{hint}",
        solver.as_str()
    ))
}

/// Solve a parsed file with `solver`, honouring the file's parameters.
pub fn solve_file(file: &ProblemFile, solver: SolverName) -> Result<SolveReport, CliError> {
    let instance = file.instance(solver)?;
    let params = &file.params;
    let epsilon = params.epsilon.unwrap_or(DEFAULT_EPSILON);
    let result = match (&instance, solver) {
        (Instance::Gopt(pr), SolverName::Sinkhorn) => {
            let config = EntropicConfig {
                epsilon,
                tol: params.tol.unwrap_or(DEFAULT_SINKHORN_TOL),
                max_iters: params.max_iters.unwrap_or(DEFAULT_SINKHORN_ITERS),
                ..EntropicConfig::default()
            };
            solve_egopt(pr, &config)
        }
        (Instance::Gopt(pr), SolverName::Lp) => solve_gopt_lp(pr),
        (Instance::Gopt(pr), SolverName::Oracle) => solve_gopt_oracle(pr),
        (
            Instance::Mopt {
                problem,
                alpha,
                beta,
            },
            SolverName::MoptLp,
        ) => solve_mopt_lp(problem, *alpha, *beta),
        (Instance::Mopt { problem, .. }, SolverName::MoptDykstra) => solve_emopt_dykstra(
            problem,
            epsilon,
            params.max_iters.unwrap_or(DEFAULT_DYKSTRA_ITERS),
            params.tol.unwrap_or(DEFAULT_DYKSTRA_TOL),
        ),
        (Instance::Sopt { cost, p, q }, SolverName::Sopt) => solve_sopt(cost, p, q),
        _ => unreachable!("instance kind always follows the solver"),
    };
    result.map_err(|e| rejected(solver, e))
}

fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn max_abs_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// JSON report of a solve. `source`/`target` are the input measures used
/// for the marginal residuals `max |plan marginal - measure|`.
pub fn report_json(report: &SolveReport, source: &[f64], target: &[f64]) -> Value {
    let plan = &report.plan;
    let triplets: Vec<Value> = plan
        .triplets(PLAN_THRESHOLD)
        .into_iter()
        .map(|(i, j, v)| json!([i, j, v]))
        .collect();
    let p = Array1::from(source.to_vec());
    let q = Array1::from(target.to_vec());
    json!({
        "version": FORMAT_VERSION,
        "solver": report.solver,
        "objective": {
            "transport": real(report.objective.transport),
            "penalty1": real(report.objective.penalty1),
            "penalty2": real(report.objective.penalty2),
            "total": real(report.objective.total),
        },
        "primal": real(report.primal_value),
        "dual": report.dual_value.map_or(Value::Null, real),
        "gap": report.gap.map_or(Value::Null, real),
        "iterations": report.iterations,
        "converged": report.converged,
        "plan": {
            "rows": plan.nrows(),
            "cols": plan.ncols(),
            "triplets": triplets,
        },
        "marginal_residuals": {
            "source": real(max_abs_diff(plan.row_marginal(), &p)),
            "target": real(max_abs_diff(plan.col_marginal(), &q)),
            "mass": real(plan.total_mass()),
        },
    })
}

/// `(rows, cols, [(i, j, mass)])`.
pub type PlanTriplets = (usize, usize, Vec<(usize, usize, f64)>);

/// Read plan triplets back out of a report produced by [`report_json`].
pub fn plan_triplets_from_report(report: &Value) -> Option<PlanTriplets> {
    let plan = report.get("plan")?;
    let n = plan.get("rows")?.as_u64()? as usize;
    let m = plan.get("cols")?.as_u64()? as usize;
    let mut out = Vec::new();
    for t in plan.get("triplets")?.as_array()? {
        let t = t.as_array()?;
        out.push((
            t.first()?.as_u64()? as usize,
            t.get(1)?.as_u64()? as usize,
            t.get(2)?.as_f64()?,
        ));
    }
    Some((n, m, out))
}

#[derive(Debug, Parser)]
#[command(
    name = "gopt",
    version,
    about = "Generalized optimal partial transport solvers"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and print a JSON report.
    Solve {
        file: PathBuf,
        /// Overrides the solver named in the file.
        #[arg(long, value_enum)]
        solver: Option<SolverName>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in cross-solver consistency suite.
    Selftest,
}

/// Entry point used by the binary. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match args.command {
        Command::Selftest => selftest(out),
        Command::Solve {
            file,
            solver,
            epsilon,
            eta,
            tol,
            max_iters,
            output,
        } => {
            let result = (|| -> Result<i32, CliError> {
                let text = std::fs::read_to_string(&file)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", file.display())))?;
                let mut problem = parse_problem(&text)?;
                let solver = solver.unwrap_or(problem.solver);
                let params = &mut problem.params;
                params.epsilon = epsilon.or(params.epsilon);
                params.eta = eta.or(params.eta);
                params.tol = tol.or(params.tol);
                params.max_iters = max_iters.or(params.max_iters);
                let report = solve_file(&problem, solver)?;
                let value = report_json(&report, &problem.source.weights, &problem.target.weights);
                let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
                text.push('\n');
                match &output {
                    Some(path) => std::fs::write(path, text)?,
                    None => out.write_all(text.as_bytes())?,
                }
                Ok(if report.converged {
                    EXIT_OK
                } else {
                    EXIT_NOT_CONVERGED
                })
            })();
            match result {
                Ok(code) => {
                    if code == EXIT_NOT_CONVERGED {
                        let _ = writeln!(err, "warning: solver did not converge");
                    }
                    code
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}

pub const SELFTEST_SEED: u64 = 0x5eed_607f;
pub const SELFTEST_INSTANCES: usize = 10;
pub const SELFTEST_EPSILON: f64 = 0.01;

/// The fixed instance list of the self-test: PTV on both sides, up to 4x4.
pub fn selftest_instances() -> Vec<GoptProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED);
    (0..SELFTEST_INSTANCES)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let m = rng.random_range(1..=4);
            let c = Array2::from_shape_fn((n, m), |_| rng.random_range(0.0..10.0));
            let p = Array1::from_shape_fn(n, |_| rng.random_range(0.1..2.0));
            let q = Array1::from_shape_fn(m, |_| rng.random_range(0.1..2.0));
            let l1 = Array1::from_shape_fn(n, |_| rng.random_range(0.0..5.0));
            let l2 = Array1::from_shape_fn(m, |_| rng.random_range(0.0..5.0));
            GoptProblem::new(
                CostMatrix::new(c).expect("costs are finite"),
                DiscreteMeasure::new(p).expect("weights are positive"),
                DiscreteMeasure::new(q).expect("weights are positive"),
                l1,
                l2,
                PenaltyKind::Ptv,
                PenaltyKind::Ptv,
            )
            .expect("valid instance")
        })
        .collect()
}

/// Tolerance for the entropic solver at `epsilon` on an `n x m` problem.
pub fn entropic_tolerance(epsilon: f64, n: usize, m: usize) -> f64 {
    (5.0 * epsilon * (n * m) as f64).max(1e-2)
}

/// Self-test with the default entropic solver.
pub fn selftest(out: &mut dyn Write) -> i32 {
    selftest_with(out, solve_egopt)
}

/// Self-test with a pluggable entropic solver, compared against the LP
/// reduction and the dense simplex on every instance.
pub fn selftest_with<F>(out: &mut dyn Write, entropic: F) -> i32
where
    F: Fn(&GoptProblem, &EntropicConfig) -> crate::Result<SolveReport>,
{
    let config = EntropicConfig::with_epsilon(SELFTEST_EPSILON);
    let mut worst: Option<(usize, f64, String)> = None;
    let mut failures = 0;
    for (k, problem) in selftest_instances().iter().enumerate() {
        let outcome = (|| -> crate::Result<(f64, f64, f64, bool)> {
            let oracle = solve_gopt_oracle(problem)?.objective.total;
            let lp = solve_gopt_lp(problem)?.objective.total;
            let ent = entropic(problem, &config)?;
            Ok((oracle, lp, ent.objective.total, ent.converged))
        })();
        let tol = entropic_tolerance(SELFTEST_EPSILON, problem.n(), problem.m());
        let (line, excess) =
            match outcome {
                Ok((oracle, lp, ent, converged)) => {
                    let exact_err = (oracle - lp).abs();
                    let ent_err = (ent - lp).abs();
                    let excess = (exact_err / 1e-7).max(ent_err / tol);
                    let ok = excess <= 1.0 && converged;
                    let line =
                        format!(
                    "instance {k} ({}x{}): oracle {oracle:.9} lp {lp:.9} sinkhorn {ent:.9} \
                     |oracle-lp| {exact_err:.3e} |sinkhorn-lp| {ent_err:.3e} (tol {tol:.3e}) {}",
                    problem.n(),
                    problem.m(),
                    if ok { "ok" } else if converged { "MISMATCH" } else { "NOT CONVERGED" }
                );
                    (line, if ok { excess } else { 1.0 + excess })
                }
                Err(e) => (format!("instance {k}: error: {e}"), f64::INFINITY),
            };
        let _ = writeln!(out, "{line}");
        if excess > 1.0 {
            failures += 1;
        }
        if worst.as_ref().is_none_or(|(_, w, _)| excess > *w) {
            worst = Some((k, excess, line));
        }
    }
    if failures == 0 {
        let _ = writeln!(out, "selftest passed: {SELFTEST_INSTANCES} instances");
        EXIT_OK
    } else {
        let _ = writeln!(
            out,
            "selftest FAILED: {failures} of {SELFTEST_INSTANCES} instances"
        );
        if let Some((k, _, line)) = worst {
            let _ = writeln!(out, "worst offender: instance {k}");
            let _ = writeln!(out, "  {line}");
            let _ = writeln!(out, "  {:?}", selftest_instances()[k]);
        }
        EXIT_SELFTEST_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TV_DUPLICATION: &str = r#"{
        "version": "gopt/1",
        "source": { "weights": [1.0], "coords": [[0.0]] },
        "target": { "weights": [1.0, 1.0], "coords": [[0.0], [1.0]] },
        "cost_rule": "sq_euclidean",
        "lambda1": 0.0,
        "lambda2": 100.0,
        "penalty1": "tv",
        "penalty2": "tv",
        "solver": "sinkhorn",
        "params": { "epsilon": 0.01 }
    }"#;

    #[test]
    fn parses_and_broadcasts_lambda() {
        let f = parse_problem(TV_DUPLICATION).unwrap();
        let Instance::Gopt(pr) = f.instance(SolverName::Sinkhorn).unwrap() else {
            panic!()
        };
        assert_eq!(pr.lambda2.to_vec(), vec![100.0, 100.0]);
        assert_eq!(pr.cost.entries()[[0, 1]], 1.0);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_problem("{\n  \"version\": \"gopt/1\",\n  \"bogus\": 1\n}").unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_problem("{\"version\": \"v0\"}"),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn cost_and_rule_are_exclusive() {
        let text = TV_DUPLICATION.replace("\"cost_rule\"", "\"cost\": [[0.0, 1.0]], \"cost_rule\"");
        let f = parse_problem(&text).unwrap();
        assert!(matches!(
            f.instance(SolverName::Sinkhorn),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn lp_rejects_tv_with_hint() {
        let f = parse_problem(TV_DUPLICATION).unwrap();
        let err = solve_file(&f, SolverName::Lp).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_REJECTED);
        assert!(err.to_string().contains("oracle"));
    }

    #[test]
    fn non_finite_values_are_strings() {
        assert_eq!(real(f64::INFINITY), json!("inf"));
        assert_eq!(real(1.5), json!(1.5));
    }
}
