//! C ABI over the `gopt` solvers.
//!
//! Problems and reports are opaque heap handles. Every fallible call
//! returns a [`GoptStatus`]; on failure a description is available from
//! [`gopt_last_error_message`] on the same thread. Matrices are dense,
//! row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gopt::exact_lp::{solve_gopt_lp, solve_sopt};
use gopt::mopt::{solve_emopt_dykstra, solve_mopt_lp, MoptProblem};
use gopt::oracle::solve_gopt_oracle;
use gopt::sinkhorn::{solve_egopt, EntropicConfig};
use gopt::{CostMatrix, DiscreteMeasure, GoptError, GoptProblem, PenaltyKind, SolveReport};
use ndarray::{Array1, Array2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    Unbalanced = 5,
    LpFailure = 6,
    /// The requested quantity is not produced by this solver.
    Unavailable = 7,
    BufferTooSmall = 8,
    Internal = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoptPenalty {
    Tv = 0,
    Ptv = 1,
}

impl From<GoptPenalty> for PenaltyKind {
    fn from(p: GoptPenalty) -> Self {
        match p {
            GoptPenalty::Tv => PenaltyKind::Tv,
            GoptPenalty::Ptv => PenaltyKind::Ptv,
        }
    }
}

/// Objective split into transport cost and the two marginal penalties.
/// Infinite penalties are reported as `INFINITY`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoptObjective {
    pub transport: f64,
    pub penalty1: f64,
    pub penalty2: f64,
    pub total: f64,
}

/// Opaque GOPT problem.
pub struct GoptProblemHandle {
    inner: GoptProblem,
}

/// Opaque solver report.
pub struct GoptReportHandle {
    inner: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &GoptError) -> GoptStatus {
    match err {
        GoptError::Dimension(_) => GoptStatus::DimensionMismatch,
        GoptError::InvalidInput(_) => GoptStatus::InvalidArgument,
        GoptError::Unsupported(_) => GoptStatus::Unsupported,
        GoptError::Unbalanced { .. } => GoptStatus::Unbalanced,
        GoptError::Lp(_) => GoptStatus::LpFailure,
        GoptError::Internal(_) => GoptStatus::Internal,
    }
}

struct Failure(GoptStatus, String);

impl From<GoptError> for Failure {
    fn from(e: GoptError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GoptStatus::NullPointer, format!("{what} is null"))
}

/// Run `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GoptStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GoptStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            GoptStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn cost_matrix(cost: *const f64, n: usize, m: usize) -> Result<CostMatrix, Failure> {
    let len = n
        .checked_mul(m)
        .ok_or_else(|| Failure(GoptStatus::InvalidArgument, "n * m overflows".into()))?;
    let c = slice(cost, len, "cost")?;
    let entries = Array2::from_shape_vec((n, m), c.to_vec())
        .map_err(|e| Failure(GoptStatus::DimensionMismatch, e.to_string()))?;
    Ok(CostMatrix::new(entries)?)
}

unsafe fn measure(weights: *const f64, len: usize, what: &str) -> Result<DiscreteMeasure, Failure> {
    Ok(DiscreteMeasure::new(slice(weights, len, what)?.to_vec())?)
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn report_out(out: *mut *mut GoptReportHandle, report: SolveReport) -> Result<(), Failure> {
    unsafe { emit(out, GoptReportHandle { inner: report }) }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gopt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn gopt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn gopt_status_name(status: GoptStatus) -> *const c_char {
    let name: &CStr = match status {
        GoptStatus::Ok => c"ok",
        GoptStatus::NullPointer => c"null pointer",
        GoptStatus::InvalidArgument => c"invalid argument",
        GoptStatus::DimensionMismatch => c"dimension mismatch",
        GoptStatus::Unsupported => c"unsupported",
        GoptStatus::Unbalanced => c"unbalanced",
        GoptStatus::LpFailure => c"lp failure",
        GoptStatus::Unavailable => c"unavailable",
        GoptStatus::BufferTooSmall => c"buffer too small",
        GoptStatus::Internal => c"internal error",
        GoptStatus::Panic => c"panic",
    };
    name.as_ptr()
}

/// Build a GOPT problem. `cost` is `n * m` row-major, `p`/`lambda1` have
/// `n` entries and `q`/`lambda2` have `m`.
///
/// # Safety
/// Every array pointer must be valid for reads of its stated length and
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gopt_problem_new(
    cost: *const f64,
    n: usize,
    m: usize,
    p: *const f64,
    q: *const f64,
    lambda1: *const f64,
    lambda2: *const f64,
    penalty1: GoptPenalty,
    penalty2: GoptPenalty,
    out: *mut *mut GoptProblemHandle,
) -> GoptStatus {
    guard(|| {
        let cost = cost_matrix(cost, n, m)?;
        let p = measure(p, n, "p")?;
        let q = measure(q, m, "q")?;
        let l1 = Array1::from(slice(lambda1, n, "lambda1")?.to_vec());
        let l2 = Array1::from(slice(lambda2, m, "lambda2")?.to_vec());
        let inner = GoptProblem::new(cost, p, q, l1, l2, penalty1.into(), penalty2.into())?;
        emit(out, GoptProblemHandle { inner })
    })
}

/// # Safety
/// `problem` must be NULL or a handle from [`gopt_problem_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gopt_problem_free(problem: *mut GoptProblemHandle) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Entropic solver at regularization `epsilon`. `max_iters == 0` and
/// `tol <= 0` select the defaults.
///
/// # Safety
/// `problem` must be a live problem handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_sinkhorn(
    problem: *const GoptProblemHandle,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        let mut config = EntropicConfig::with_epsilon(epsilon);
        if max_iters > 0 {
            config.max_iters = max_iters;
        }
        if tol > 0.0 {
            config.tol = tol;
        }
        report_out(out, solve_egopt(&problem.inner, &config)?)
    })
}

/// Exact solver through the balanced-transport reduction (PTV only).
///
/// # Safety
/// `problem` must be a live problem handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_lp(
    problem: *const GoptProblemHandle,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        report_out(out, solve_gopt_lp(&problem.inner)?)
    })
}

/// Exact solver through the dense reference simplex (TV and PTV).
///
/// # Safety
/// `problem` must be a live problem handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_oracle(
    problem: *const GoptProblemHandle,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        report_out(out, solve_gopt_oracle(&problem.inner)?)
    })
}

/// Mass-constrained transport `sum gamma = eta` by the exact reduction.
///
/// # Safety
/// Array pointers must be valid for their lengths; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_mopt_lp(
    cost: *const f64,
    n: usize,
    m: usize,
    p: *const f64,
    q: *const f64,
    eta: f64,
    alpha: f64,
    beta: f64,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let problem = MoptProblem::new(
            cost_matrix(cost, n, m)?,
            measure(p, n, "p")?,
            measure(q, m, "q")?,
            eta,
        )?;
        report_out(out, solve_mopt_lp(&problem, alpha, beta)?)
    })
}

/// Entropic mass-constrained transport by Dykstra's algorithm.
///
/// # Safety
/// Array pointers must be valid for their lengths; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_mopt_dykstra(
    cost: *const f64,
    n: usize,
    m: usize,
    p: *const f64,
    q: *const f64,
    eta: f64,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let problem = MoptProblem::new(
            cost_matrix(cost, n, m)?,
            measure(p, n, "p")?,
            measure(q, m, "q")?,
            eta,
        )?;
        report_out(out, solve_emopt_dykstra(&problem, epsilon, max_iters, tol)?)
    })
}

/// Semi-constrained transport: column marginal `= q`, row marginal `<= p`.
///
/// # Safety
/// Array pointers must be valid for their lengths; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_solve_sopt(
    cost: *const f64,
    n: usize,
    m: usize,
    p: *const f64,
    q: *const f64,
    out: *mut *mut GoptReportHandle,
) -> GoptStatus {
    guard(|| {
        let cost = cost_matrix(cost, n, m)?;
        report_out(
            out,
            solve_sopt(&cost, &measure(p, n, "p")?, &measure(q, m, "q")?)?,
        )
    })
}

/// # Safety
/// `report` must be NULL or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_free(report: *mut GoptReportHandle) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn with_report(
    report: *const GoptReportHandle,
    body: impl FnOnce(&SolveReport) -> Result<(), Failure>,
) -> GoptStatus {
    guard(|| body(&report.as_ref().ok_or_else(|| null("report"))?.inner))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

/// # Safety
/// `report` must be a live report handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_objective(
    report: *const GoptReportHandle,
    out: *mut GoptObjective,
) -> GoptStatus {
    with_report(report, |r| {
        let o = r.objective;
        write_out(
            out,
            GoptObjective {
                transport: o.transport,
                penalty1: o.penalty1,
                penalty2: o.penalty2,
                total: o.total,
            },
        )
    })
}

/// Plan dimensions.
///
/// # Safety
/// `report` must be a live report handle; `rows`, `cols` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_shape(
    report: *const GoptReportHandle,
    rows: *mut usize,
    cols: *mut usize,
) -> GoptStatus {
    with_report(report, |r| {
        write_out(rows, r.plan.nrows())?;
        write_out(cols, r.plan.ncols())
    })
}

/// Copy the plan, row-major, into `buffer` of `len >= rows * cols` doubles.
///
/// # Safety
/// `report` must be a live report handle; `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_plan(
    report: *const GoptReportHandle,
    buffer: *mut f64,
    len: usize,
) -> GoptStatus {
    with_report(report, |r| {
        let need = r.plan.nrows() * r.plan.ncols();
        if len < need {
            return Err(Failure(
                GoptStatus::BufferTooSmall,
                format!("plan needs {need} entries, buffer has {len}"),
            ));
        }
        if need == 0 {
            return Ok(());
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, need);
        for (d, s) in dst.iter_mut().zip(r.plan.matrix().iter()) {
            *d = *s;
        }
        Ok(())
    })
}

/// Value the solver minimized (entropic objective for scaling solvers).
///
/// # Safety
/// `report` must be a live report handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_primal(
    report: *const GoptReportHandle,
    out: *mut f64,
) -> GoptStatus {
    with_report(report, |r| write_out(out, r.primal_value))
}

/// Dual value; `GOPT_STATUS_UNAVAILABLE` for solvers without a certificate.
///
/// # Safety
/// `report` must be a live report handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_dual(
    report: *const GoptReportHandle,
    out: *mut f64,
) -> GoptStatus {
    with_report(report, |r| match r.dual_value {
        Some(d) => write_out(out, d),
        None => Err(Failure(
            GoptStatus::Unavailable,
            format!("{} reports no dual value", r.solver),
        )),
    })
}

/// Duality gap; `GOPT_STATUS_UNAVAILABLE` for solvers without a certificate.
///
/// # Safety
/// `report` must be a live report handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_gap(
    report: *const GoptReportHandle,
    out: *mut f64,
) -> GoptStatus {
    with_report(report, |r| match r.gap {
        Some(g) => write_out(out, g),
        None => Err(Failure(
            GoptStatus::Unavailable,
            format!("{} reports no duality gap", r.solver),
        )),
    })
}

/// # Safety
/// `report` must be a live report handle; `iterations`, `converged` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_status(
    report: *const GoptReportHandle,
    iterations: *mut usize,
    converged: *mut bool,
) -> GoptStatus {
    with_report(report, |r| {
        write_out(iterations, r.iterations)?;
        write_out(converged, r.converged)
    })
}

/// Static name of the solver that produced the report.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn gopt_report_solver(report: *const GoptReportHandle) -> *const c_char {
    let Some(r) = report.as_ref() else {
        return ptr::null();
    };
    match r.inner.solver {
        "sinkhorn" => c"sinkhorn".as_ptr(),
        "lp" => c"lp".as_ptr(),
        "oracle" => c"oracle".as_ptr(),
        "mopt-lp" => c"mopt-lp".as_ptr(),
        "mopt-dykstra" => c"mopt-dykstra".as_ptr(),
        "sopt" => c"sopt".as_ptr(),
        _ => c"unknown".as_ptr(),
    }
}
