//! C ABI over `gcgs-core`.
//!
//! Problems and results are opaque heap handles created by `*_new` /
//! `*_solve` functions and released with the matching `*_free`. Every
//! fallible call returns a [`GcgsStatus`]; on failure a description is kept
//! per thread and can be read with [`gcgs_last_error_message`].
//!
//! Matrices are passed as dense row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use gcgs_core::elasticnet::{l1_lmo, pg_solve, project_l1, spg_solve, ElasticNetProblem, Loss};
use gcgs_core::gcg::OracleError;
use gcgs_core::numerics::Mat;
use gcgs_core::ot::{
    make_cluster_data, ot_split, sinkhorn_report, transport_lmo, Histogram, SinkhornError, SinkhornParams,
    TransportProblem, DEFAULT_POSITION_SCALE,
};
use gcgs_core::{cg_adapter, solve, SolveResult, SolverConfig, StepRule, Termination};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NotConverged = 4,
    SolveFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgsLoss {
    Squared = 0,
    Logistic = 1,
    SquaredHinge = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgsSolver {
    Cgs = 0,
    Cg = 1,
    /// Elastic net only.
    Spg = 2,
    /// Elastic net only.
    Pg = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgsStep {
    Exact = 0,
    Armijo = 1,
    Fixed = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgsTermination {
    GapTol = 0,
    ResidualTol = 1,
    MaxIter = 2,
    Stalled = 3,
}

/// Solver settings; start from [`gcgs_solver_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcgsSolverOptions {
    pub solver: GcgsSolver,
    pub step: GcgsStep,
    pub max_iter: usize,
    /// 0 disables the gap test.
    pub gap_tol: f64,
    pub gap_relative: bool,
    /// Negative disables the residual test.
    pub residual_tol: f64,
    pub armijo_sigma: f64,
    pub armijo_beta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GcgsIteration {
    pub iter: usize,
    pub elapsed_s: f64,
    pub objective: f64,
    pub surrogate_gap: f64,
    pub step_alpha: f64,
    /// Marginal violation (transport) or fixed-point residual (elastic net);
    /// NaN when not available.
    pub residual: f64,
}

pub struct GcgsEnetProblem(ElasticNetProblem);

pub struct GcgsOtProblem(TransportProblem);

pub struct GcgsResult(SolveResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GcgsStatus, String);

impl Failure {
    fn new(status: GcgsStatus, msg: impl ToString) -> Self {
        Self(status, msg.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GcgsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GcgsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GcgsStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(GcgsStatus::NullPointer, format!("{name} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(GcgsStatus::NullPointer, format!("{name} is null")));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(GcgsStatus::NullPointer, format!("{name} is null")))
}

fn out_ptr<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(GcgsStatus::NullPointer, "output handle pointer is null"));
    }
    Ok(())
}

fn area(rows: usize, cols: usize) -> Result<usize, Failure> {
    rows.checked_mul(cols)
        .ok_or_else(|| Failure::new(GcgsStatus::Dimension, format!("{rows} x {cols} overflows")))
}

fn matrix(data: &[f64], rows: usize, cols: usize) -> Result<Mat, Failure> {
    Mat::from_vec(rows, cols, data.to_vec()).map_err(|e| Failure::new(GcgsStatus::Dimension, e))
}

fn histogram(w: &[f64], name: &str) -> Result<Histogram, Failure> {
    Histogram::new(w.to_vec()).map_err(|e| Failure::new(GcgsStatus::InvalidArgument, format!("{name}: {e}")))
}

fn sinkhorn_failure(e: SinkhornError) -> Failure {
    let status = match e {
        SinkhornError::NotConverged { .. } => GcgsStatus::NotConverged,
        SinkhornError::Dimension { .. } => GcgsStatus::Dimension,
        _ => GcgsStatus::InvalidArgument,
    };
    Failure::new(status, e)
}

/// Version string of the library; static storage.
#[no_mangle]
pub extern "C" fn gcgs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn gcgs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn gcgs_solver_options_default() -> GcgsSolverOptions {
    let d = SolverConfig::default();
    GcgsSolverOptions {
        solver: GcgsSolver::Cgs,
        step: GcgsStep::Exact,
        max_iter: d.max_iter,
        gap_tol: d.gap_tol,
        gap_relative: d.gap_relative,
        residual_tol: -1.0,
        armijo_sigma: d.armijo_sigma,
        armijo_beta: d.armijo_beta,
    }
}

fn solver_config(o: &GcgsSolverOptions) -> SolverConfig {
    SolverConfig {
        step_rule: match o.step {
            GcgsStep::Exact => StepRule::Exact,
            GcgsStep::Armijo => StepRule::Armijo,
            GcgsStep::Fixed => StepRule::Fixed,
        },
        max_iter: o.max_iter,
        gap_tol: o.gap_tol,
        gap_relative: o.gap_relative,
        residual_tol: (o.residual_tol >= 0.0).then_some(o.residual_tol),
        armijo_sigma: o.armijo_sigma,
        armijo_beta: o.armijo_beta,
        ..SolverConfig::default()
    }
}

/// Elastic-net problem over the `rows x cols` design `z` with labels `y`
/// (length `rows`; ±1 for the classification losses).
///
/// # Safety
/// `z` must point to `rows * cols` doubles and `y` to `rows` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcgs_enet_problem_new(
    z: *const f64,
    rows: usize,
    cols: usize,
    y: *const f64,
    loss: GcgsLoss,
    lambda: f64,
    tau: f64,
    out: *mut *mut GcgsEnetProblem,
) -> GcgsStatus {
    guard(|| {
        out_ptr(out)?;
        let z = matrix(input(z, area(rows, cols)?, "z")?, rows, cols)?;
        let y = input(y, rows, "y")?.to_vec();
        let loss = match loss {
            GcgsLoss::Squared => Loss::Squared,
            GcgsLoss::Logistic => Loss::Logistic,
            GcgsLoss::SquaredHinge => Loss::SquaredHinge,
        };
        let p = ElasticNetProblem::new(z, y, loss, lambda, tau)
            .map_err(|e| Failure::new(GcgsStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(GcgsEnetProblem(p)));
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a handle from [`gcgs_enet_problem_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcgs_enet_problem_free(problem: *mut GcgsEnetProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of coefficients, or 0 for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcgs_enet_problem_dim(problem: *const GcgsEnetProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.n_features())
}

/// Solves from `x0` (NULL starts at zero).
///
/// # Safety
/// `problem` must be a live handle, `x0` NULL or of length
/// [`gcgs_enet_problem_dim`], and `options` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn gcgs_enet_solve(
    problem: *const GcgsEnetProblem,
    x0: *const f64,
    options: *const GcgsSolverOptions,
    out: *mut *mut GcgsResult,
) -> GcgsStatus {
    guard(|| {
        out_ptr(out)?;
        let p = &handle(problem, "problem")?.0;
        let n = p.n_features();
        let x0 = if x0.is_null() {
            vec![0.0; n]
        } else {
            input(x0, n, "x0")?.to_vec()
        };
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| gcgs_solver_options_default());
        let cfg = solver_config(&opts);
        let tau = p.tau();
        let res = match opts.solver {
            GcgsSolver::Cgs => solve(p, &x0, &cfg),
            GcgsSolver::Cg => {
                let classic = cg_adapter(p, move |g: &[f64]| -> Result<Vec<f64>, OracleError> {
                    Ok(l1_lmo(g, tau))
                });
                solve(&classic, &x0, &cfg)
            }
            GcgsSolver::Spg => spg_solve(p, &x0, &cfg),
            GcgsSolver::Pg => pg_solve(p, &x0, &cfg),
        }
        .map_err(|e| Failure::new(GcgsStatus::SolveFailed, e))?;
        *out = Box::into_raw(Box::new(GcgsResult(res)));
        Ok(())
    })
}

/// Regularized transport problem on explicit data. `lap_s` (`ns x ns`),
/// `lap_t` (`nt x nt`), `xs` (`ns x dim`) and `xt` (`nt x dim`) may all be
/// NULL for a purely entropic problem; otherwise all four are required.
///
/// # Safety
/// Non-NULL pointers must reference arrays of the stated sizes.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_problem_new(
    cost: *const f64,
    ns: usize,
    nt: usize,
    mu_s: *const f64,
    mu_t: *const f64,
    lambda_ent: f64,
    lambda_lap: f64,
    lap_s: *const f64,
    lap_t: *const f64,
    xs: *const f64,
    xt: *const f64,
    dim: usize,
    out: *mut *mut GcgsOtProblem,
) -> GcgsStatus {
    guard(|| {
        out_ptr(out)?;
        let cost = matrix(input(cost, area(ns, nt)?, "cost")?, ns, nt)?;
        let a = histogram(input(mu_s, ns, "mu_s")?, "mu_s")?;
        let b = histogram(input(mu_t, nt, "mu_t")?, "mu_t")?;
        let invalid = |e: gcgs_core::ot::OtError| Failure::new(GcgsStatus::InvalidArgument, e);
        let mut p = TransportProblem::entropic(cost, a, b, lambda_ent).map_err(invalid)?;
        let given = [lap_s.is_null(), lap_t.is_null(), xs.is_null(), xt.is_null()];
        if given.iter().all(|&null| !null) {
            p.lap_s = matrix(input(lap_s, area(ns, ns)?, "lap_s")?, ns, ns)?;
            p.lap_t = matrix(input(lap_t, area(nt, nt)?, "lap_t")?, nt, nt)?;
            p.xs = matrix(input(xs, area(ns, dim)?, "xs")?, ns, dim)?;
            p.xt = matrix(input(xt, area(nt, dim)?, "xt")?, nt, dim)?;
            p.lambda_lap = lambda_lap;
            p.validate().map_err(invalid)?;
        } else if given.iter().any(|&null| !null) {
            return Err(Failure::new(
                GcgsStatus::NullPointer,
                "lap_s, lap_t, xs and xt must be given together",
            ));
        }
        *out = Box::into_raw(Box::new(GcgsOtProblem(p)));
        Ok(())
    })
}

/// The synthetic cluster experiment with `k`-nearest-neighbor Laplacians.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_problem_new_clusters(
    ns: usize,
    nt: usize,
    clusters: usize,
    noise: f64,
    seed: u64,
    lambda_ent: f64,
    lambda_lap: f64,
    k: usize,
    out: *mut *mut GcgsOtProblem,
) -> GcgsStatus {
    guard(|| {
        out_ptr(out)?;
        let invalid = |e: gcgs_core::ot::OtError| Failure::new(GcgsStatus::InvalidArgument, e);
        let data = make_cluster_data(ns, nt, clusters, noise, seed).map_err(invalid)?;
        let p = TransportProblem::from_clusters(&data, lambda_ent, lambda_lap, k, DEFAULT_POSITION_SCALE)
            .map_err(invalid)?;
        *out = Box::into_raw(Box::new(GcgsOtProblem(p)));
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_problem_free(problem: *mut GcgsOtProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle; `ns` and `nt` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_problem_shape(
    problem: *const GcgsOtProblem,
    ns: *mut usize,
    nt: *mut usize,
) -> GcgsStatus {
    guard(|| {
        let (r, c) = handle(problem, "problem")?.0.shape();
        if let Some(ns) = ns.as_mut() {
            *ns = r;
        }
        if let Some(nt) = nt.as_mut() {
            *nt = c;
        }
        Ok(())
    })
}

/// Objective at the `ns x nt` plan `gamma`.
///
/// # Safety
/// `problem` must be a live handle, `gamma` of length `ns * nt`, `value` valid.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_objective(
    problem: *const GcgsOtProblem,
    gamma: *const f64,
    value: *mut f64,
) -> GcgsStatus {
    guard(|| {
        let p = &handle(problem, "problem")?.0;
        let (r, c) = p.shape();
        let gamma = matrix(input(gamma, area(r, c)?, "gamma")?, r, c)?;
        let v = value
            .as_mut()
            .ok_or_else(|| Failure::new(GcgsStatus::NullPointer, "value is null"))?;
        *v = p.objective(&gamma);
        Ok(())
    })
}

/// Solves from `gamma0` (NULL starts at the entropic plan of the cost).
/// Only [`GcgsSolver::Cgs`] and [`GcgsSolver::Cg`] apply.
///
/// # Safety
/// `problem` must be a live handle, `gamma0` NULL or of length `ns * nt`,
/// `options` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn gcgs_ot_solve(
    problem: *const GcgsOtProblem,
    gamma0: *const f64,
    options: *const GcgsSolverOptions,
    out: *mut *mut GcgsResult,
) -> GcgsStatus {
    guard(|| {
        out_ptr(out)?;
        let p = &handle(problem, "problem")?.0;
        let (r, c) = p.shape();
        let x0 = if gamma0.is_null() {
            p.initial_plan(SinkhornParams::default())
                .map_err(|e| Failure::new(GcgsStatus::NotConverged, e))?
                .into_mat()
                .into_vec()
        } else {
            input(gamma0, area(r, c)?, "gamma0")?.to_vec()
        };
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| gcgs_solver_options_default());
        let cfg = solver_config(&opts);
        let split = ot_split(p).map_err(|e| Failure::new(GcgsStatus::InvalidArgument, e))?;
        let res = match opts.solver {
            GcgsSolver::Cgs => solve(&split, &x0, &cfg),
            GcgsSolver::Cg => solve(&split.classic(), &x0, &cfg),
            GcgsSolver::Spg | GcgsSolver::Pg => {
                return Err(Failure::new(
                    GcgsStatus::InvalidArgument,
                    "projected-gradient solvers apply to the elastic net only",
                ))
            }
        }
        .map_err(|e| Failure::new(GcgsStatus::SolveFailed, e))?;
        *out = Box::into_raw(Box::new(GcgsResult(res)));
        Ok(())
    })
}

/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_free(result: *mut GcgsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Length of the final iterate, or 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_dim(result: *const GcgsResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.x_final.len())
}

/// Copies the final iterate into `buf` (capacity `len`).
///
/// # Safety
/// `result` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_x(result: *const GcgsResult, buf: *mut f64, len: usize) -> GcgsStatus {
    guard(|| {
        let x = &handle(result, "result")?.0.x_final;
        if len < x.len() {
            return Err(Failure::new(
                GcgsStatus::BufferTooSmall,
                format!("buffer holds {len} values, result has {}", x.len()),
            ));
        }
        output(buf, x.len(), "buf")?.copy_from_slice(x);
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle; `termination` valid.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_termination(
    result: *const GcgsResult,
    termination: *mut GcgsTermination,
) -> GcgsStatus {
    guard(|| {
        let t = handle(result, "result")?.0.termination;
        let slot = termination
            .as_mut()
            .ok_or_else(|| Failure::new(GcgsStatus::NullPointer, "termination is null"))?;
        *slot = match t {
            Termination::GapTol => GcgsTermination::GapTol,
            Termination::ResidualTol => GcgsTermination::ResidualTol,
            Termination::MaxIter => GcgsTermination::MaxIter,
            Termination::Stalled => GcgsTermination::Stalled,
        };
        Ok(())
    })
}

/// Number of recorded iterates (steps taken + 1), or 0 for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_trace_len(result: *const GcgsResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.trace.len())
}

/// Row `index` of the trace; the last row is the final iterate.
///
/// # Safety
/// `result` must be a live handle and `row` valid.
#[no_mangle]
pub unsafe extern "C" fn gcgs_result_trace_row(
    result: *const GcgsResult,
    index: usize,
    row: *mut GcgsIteration,
) -> GcgsStatus {
    guard(|| {
        let trace = &handle(result, "result")?.0.trace;
        let rec = trace.get(index).ok_or_else(|| {
            Failure::new(
                GcgsStatus::InvalidArgument,
                format!("row {index} out of range for a trace of {}", trace.len()),
            )
        })?;
        let slot = row
            .as_mut()
            .ok_or_else(|| Failure::new(GcgsStatus::NullPointer, "row is null"))?;
        *slot = GcgsIteration {
            iter: rec.k,
            elapsed_s: rec.elapsed_s,
            objective: rec.objective,
            surrogate_gap: rec.surrogate_gap,
            step_alpha: rec.alpha,
            residual: rec.extra_residual.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Euclidean projection of `v` onto `{x : ‖x‖₁ ≤ tau}`.
///
/// # Safety
/// `v` and `out` must each hold `n` doubles; they may alias.
#[no_mangle]
pub unsafe extern "C" fn gcgs_project_l1(v: *const f64, n: usize, tau: f64, out: *mut f64) -> GcgsStatus {
    guard(|| {
        if tau.is_nan() || tau < 0.0 {
            return Err(Failure::new(
                GcgsStatus::InvalidArgument,
                format!("tau must be non-negative, got {tau}"),
            ));
        }
        let p = project_l1(input(v, n, "v")?, tau);
        output(out, n, "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Entropic transport plan `argmin ⟨γ, C⟩ + λ Σ γ log γ` over the couplings
/// of `mu_s` and `mu_t`, written row-major into `plan`.
///
/// # Safety
/// `cost` and `plan` must hold `ns * nt` doubles, `mu_s` `ns`, `mu_t` `nt`.
#[no_mangle]
pub unsafe extern "C" fn gcgs_sinkhorn(
    cost: *const f64,
    ns: usize,
    nt: usize,
    mu_s: *const f64,
    mu_t: *const f64,
    lambda: f64,
    tol: f64,
    max_iter: usize,
    plan: *mut f64,
) -> GcgsStatus {
    guard(|| {
        let cost = matrix(input(cost, area(ns, nt)?, "cost")?, ns, nt)?;
        let rep = sinkhorn_report(
            &cost,
            input(mu_s, ns, "mu_s")?,
            input(mu_t, nt, "mu_t")?,
            lambda,
            SinkhornParams { tol, max_iter },
        )
        .map_err(sinkhorn_failure)?;
        output(plan, area(ns, nt)?, "plan")?.copy_from_slice(rep.plan.gamma().as_slice());
        Ok(())
    })
}

/// A vertex minimizer of `⟨γ, C⟩` over the couplings of `mu_s` and `mu_t`.
///
/// # Safety
/// `cost` and `plan` must hold `ns * nt` doubles, `mu_s` `ns`, `mu_t` `nt`.
#[no_mangle]
pub unsafe extern "C" fn gcgs_transport_lmo(
    cost: *const f64,
    ns: usize,
    nt: usize,
    mu_s: *const f64,
    mu_t: *const f64,
    plan: *mut f64,
) -> GcgsStatus {
    guard(|| {
        let cost = matrix(input(cost, area(ns, nt)?, "cost")?, ns, nt)?;
        let a = histogram(input(mu_s, ns, "mu_s")?, "mu_s")?;
        let b = histogram(input(mu_t, nt, "mu_t")?, "mu_t")?;
        let best = transport_lmo(&cost, &a, &b).map_err(|e| Failure::new(GcgsStatus::InvalidArgument, e))?;
        output(plan, area(ns, nt)?, "plan")?.copy_from_slice(best.gamma().as_slice());
        Ok(())
    })
}
