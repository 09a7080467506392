//! Generalized conditional gradient splitting.
//!
//! The objective is split as `F = f + g` with `f, g` convex and
//! differentiable on a compact convex set. Each iteration linearizes only
//! `f`, asks the problem for a minimizer `s` of `⟨∇f(x), s⟩ + g(s)` over the
//! set, and moves along `s - x`. With `g ≡ 0` this is textbook Frank-Wolfe;
//! [`cg_adapter`] builds that baseline out of any split objective plus a
//! linear minimization oracle.
//!
//! The quantity `-[⟨∇f(x), s - x⟩ + g(s) - g(x)]` is non-negative and bounds
//! `F(x) - F(x*)` from above, so the solver uses it as a stopping rule.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, golden_section_min, norm_inf, NumericsError, Rng, GOLDEN_TOL};

/// Error type problems return from their evaluators and oracles.
pub type OracleError = Box<dyn std::error::Error + Send + Sync + 'static>;

/// Directions with `‖dx‖∞` at or below this are treated as converged.
pub const DX_CONVERGED: f64 = 1e-14;
/// Smallest Armijo step tried before reporting a stall.
pub const ARMIJO_MIN_STEP: f64 = 1.0 / (1u64 << 50) as f64;

/// The contract every problem implements to be solved by [`solve`].
///
/// Points are flat `f64` slices (matrices are flattened row-major).
/// Implementations must not mutate themselves while a solve is running.
pub trait SplitObjective {
    fn dim(&self) -> usize;

    fn f(&self, x: &[f64]) -> f64;

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError>;

    fn g(&self, x: &[f64]) -> f64;

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError>;

    /// Feasible minimizer of `⟨grad_f, s⟩ + g(s)` over the feasible set.
    fn partial_oracle(&self, x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError>;

    fn objective(&self, x: &[f64]) -> f64 {
        self.f(x) + self.g(x)
    }

    /// `∇F = ∇f + ∇g`.
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        let mut gf = self.grad_f(x)?;
        let gg = self.grad_g(x)?;
        numerics::axpy(1.0, &gg, &mut gf);
        Ok(gf)
    }

    /// Closed-form minimizer of `F(x + α dx)` over `α ∈ [0, 1]`, when the
    /// problem has one. `None` falls back to golden-section search.
    fn exact_step(&self, _x: &[f64], _dx: &[f64]) -> Option<f64> {
        None
    }

    /// Problem-specific residual recorded next to the gap (marginal
    /// violation, fixed-point residual, ...).
    fn residual(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

impl<T: SplitObjective + ?Sized> SplitObjective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn f(&self, x: &[f64]) -> f64 {
        (**self).f(x)
    }
    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        (**self).grad_f(x)
    }
    fn g(&self, x: &[f64]) -> f64 {
        (**self).g(x)
    }
    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        (**self).grad_g(x)
    }
    fn partial_oracle(&self, x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        (**self).partial_oracle(x, grad_f)
    }
    fn objective(&self, x: &[f64]) -> f64 {
        (**self).objective(x)
    }
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        (**self).grad(x)
    }
    fn exact_step(&self, x: &[f64], dx: &[f64]) -> Option<f64> {
        (**self).exact_step(x, dx)
    }
    fn residual(&self, x: &[f64]) -> Option<f64> {
        (**self).residual(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Line minimization of `F` along the direction.
    Exact,
    /// Monotone backtracking from `α = 1`.
    Armijo,
    /// `α_k = 2 / (k + 2)`.
    Fixed,
}

impl std::str::FromStr for StepRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "armijo" => Ok(Self::Armijo),
            "fixed" => Ok(Self::Fixed),
            other => Err(format!("unknown step rule `{other}` (expected exact, armijo or fixed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub step_rule: StepRule,
    /// Maximum number of steps taken.
    pub max_iter: usize,
    /// Stop once the surrogate gap is at or below this; 0 disables the test.
    pub gap_tol: f64,
    /// Interpret `gap_tol` relative to the gap at the starting point.
    pub gap_relative: bool,
    /// Stop once the problem residual is at or below this.
    pub residual_tol: Option<f64>,
    pub armijo_sigma: f64,
    pub armijo_beta: f64,
    /// Keep every iteration in the trace; otherwise only the final one.
    pub record_trace: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_rule: StepRule::Exact,
            max_iter: 1000,
            gap_tol: 1e-8,
            gap_relative: false,
            residual_tol: None,
            armijo_sigma: 1e-4,
            armijo_beta: 0.5,
            record_trace: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_step(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_gap_tol(mut self, gap_tol: f64) -> Self {
        self.gap_tol = gap_tol;
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = Some(tol);
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidConfig(msg));
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.gap_tol >= 0.0) {
            return bad(format!("gap_tol must be non-negative, got {}", self.gap_tol));
        }
        if !(self.armijo_sigma > 0.0 && self.armijo_sigma < 1.0) {
            return bad(format!("armijo_sigma must lie in (0, 1), got {}", self.armijo_sigma));
        }
        if !(self.armijo_beta > 0.0 && self.armijo_beta < 1.0) {
            return bad(format!("armijo_beta must lie in (0, 1), got {}", self.armijo_beta));
        }
        if let Some(t) = self.residual_tol {
            if !(t >= 0.0) {
                return bad(format!("residual_tol must be non-negative, got {t}"));
            }
        }
        Ok(())
    }
}

/// One row of a convergence trace. `alpha` is the step taken *from* this
/// iterate (0 on the final row).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    pub surrogate_gap: f64,
    pub alpha: f64,
    pub elapsed_s: f64,
    pub extra_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GapTol,
    #[serde(rename = "fp_residual")]
    ResidualTol,
    MaxIter,
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GapTol => "gap_tol",
            Self::ResidualTol => "fp_residual",
            Self::MaxIter => "max_iter",
            Self::Stalled => "stalled",
        }
    }

    /// Whether the run ended on a convergence test.
    pub fn converged(self) -> bool {
        matches!(self, Self::GapTol | Self::ResidualTol | Self::Stalled)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
}

impl SolveResult {
    pub fn last(&self) -> &IterationRecord {
        self.trace.last().expect("a solve always records its final iterate")
    }

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.last().k
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("starting point has dimension {got}, problem expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("oracle failed at iteration {iteration}: {source}")]
    Oracle {
        iteration: usize,
        #[source]
        source: OracleError,
    },
    #[error("non-finite objective at iteration {}: {:?}", .record.k, .record)]
    NonFinite { record: IterationRecord },
    #[error("line search failed at iteration {iteration}: {source}")]
    LineSearch {
        iteration: usize,
        #[source]
        source: NumericsError,
    },
    #[error("Armijo backtracking stalled at iteration {iteration} (directional derivative {slope:e})")]
    Stall { iteration: usize, slope: f64 },
}

/// Read-only view of one iteration, handed to solve observers.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub s: &'a [f64],
    pub grad_f: &'a [f64],
    pub objective: f64,
    pub surrogate_gap: f64,
    /// Step about to be taken; 0 on the final iterate.
    pub alpha: f64,
}

/// `-[⟨∇f(x), s - x⟩ + g(s) - g(x)]`, clamped at zero.
///
/// With `s` the partial-oracle output at `x` this bounds `F(x) - F(x*)`.
pub fn surrogate_gap<O: SplitObjective + ?Sized>(obj: &O, x: &[f64], s: &[f64], grad_f: &[f64]) -> f64 {
    gap_bracket(obj, x, s, grad_f).map_or(0.0, |b| (-b).max(0.0))
}

fn gap_bracket<O: SplitObjective + ?Sized>(obj: &O, x: &[f64], s: &[f64], grad_f: &[f64]) -> Option<f64> {
    let lin = grad_f
        .iter()
        .zip(s.iter().zip(x))
        .fold(0.0, |acc, (g, (si, xi))| acc + g * (si - xi));
    let b = lin + obj.g(s) - obj.g(x);
    b.is_finite().then_some(b)
}

/// Golden-section line minimization of `F(x + α dx)` on `[0, 1]`
/// (or the problem's closed form, when it has one).
pub fn step_exact<O: SplitObjective + ?Sized>(obj: &O, x: &[f64], dx: &[f64]) -> Result<f64, NumericsError> {
    if dx.iter().all(|&d| d == 0.0) {
        return Ok(0.0);
    }
    if let Some(a) = obj.exact_step(x, dx) {
        return Ok(a.clamp(0.0, 1.0));
    }
    let mut buf = vec![0.0; x.len()];
    golden_section_min(
        |a| {
            step_point(x, dx, a, &mut buf);
            obj.objective(&buf)
        },
        GOLDEN_TOL,
    )
}

/// Largest `α ∈ {1, β, β², ...}` meeting the sufficient-decrease test
/// `F(x + α dx) ≤ F(x) + σ α ⟨∇F(x), dx⟩`.
pub fn step_armijo<O: SplitObjective + ?Sized>(
    obj: &O,
    x: &[f64],
    dx: &[f64],
    grad_full: &[f64],
    sigma: f64,
    beta: f64,
) -> Option<f64> {
    let fx = obj.objective(x);
    let slope = numerics::dot(grad_full, dx);
    let mut buf = vec![0.0; x.len()];
    let mut alpha = 1.0;
    while alpha >= ARMIJO_MIN_STEP {
        step_point(x, dx, alpha, &mut buf);
        let trial = obj.objective(&buf);
        if trial <= fx + sigma * alpha * slope {
            return Some(alpha);
        }
        alpha *= beta;
    }
    None
}

#[inline]
pub fn step_fixed(k: usize) -> f64 {
    2.0 / (k as f64 + 2.0)
}

#[inline]
fn step_point(x: &[f64], dx: &[f64], alpha: f64, out: &mut [f64]) {
    for ((o, xi), di) in out.iter_mut().zip(x).zip(dx) {
        *o = xi + alpha * di;
    }
}

/// Runs conditional gradient splitting from `x0`.
pub fn solve<O: SplitObjective + ?Sized>(obj: &O, x0: &[f64], cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    solve_observed(obj, x0, cfg, |_| {})
}

/// [`solve`] with a callback invoked once per iterate, including the final
/// one, before the step is applied.
pub fn solve_observed<O, F>(obj: &O, x0: &[f64], cfg: &SolverConfig, mut observer: F) -> Result<SolveResult, SolveError>
where
    O: SplitObjective + ?Sized,
    F: FnMut(&IterationView<'_>),
{
    cfg.validate()?;
    if x0.len() != obj.dim() {
        return Err(SolveError::Dimension {
            expected: obj.dim(),
            got: x0.len(),
        });
    }

    let start = Instant::now();
    let mut x = x0.to_vec();
    let mut dx = vec![0.0; x.len()];
    let mut trace = Vec::new();
    let mut gap_threshold = cfg.gap_tol;

    for k in 0.. {
        let oracle_err = |source| SolveError::Oracle { iteration: k, source };
        let grad_f = obj.grad_f(&x).map_err(oracle_err)?;
        let s = obj.partial_oracle(&x, &grad_f).map_err(oracle_err)?;
        let objective = obj.objective(&x);
        let gap = surrogate_gap(obj, &x, &s, &grad_f);
        let residual = obj.residual(&x);
        if k == 0 && cfg.gap_relative {
            gap_threshold = cfg.gap_tol * gap;
        }

        let mut record = IterationRecord {
            k,
            objective,
            surrogate_gap: gap,
            alpha: 0.0,
            elapsed_s: start.elapsed().as_secs_f64(),
            extra_residual: residual,
        };
        if !objective.is_finite() {
            return Err(SolveError::NonFinite { record });
        }

        for ((d, si), xi) in dx.iter_mut().zip(&s).zip(&x) {
            *d = si - xi;
        }

        let stop = if cfg.gap_tol > 0.0 && gap <= gap_threshold {
            Some(Termination::GapTol)
        } else if matches!((cfg.residual_tol, residual), (Some(t), Some(r)) if r <= t) {
            Some(Termination::ResidualTol)
        } else if k >= cfg.max_iter {
            Some(Termination::MaxIter)
        } else if norm_inf(&dx) <= DX_CONVERGED {
            Some(Termination::Stalled)
        } else {
            None
        };

        let alpha = match stop {
            Some(_) => 0.0,
            None => match cfg.step_rule {
                StepRule::Fixed => step_fixed(k),
                StepRule::Exact => {
                    step_exact(obj, &x, &dx).map_err(|source| SolveError::LineSearch { iteration: k, source })?
                }
                StepRule::Armijo => {
                    let grad_full = obj.grad(&x).map_err(oracle_err)?;
                    match step_armijo(obj, &x, &dx, &grad_full, cfg.armijo_sigma, cfg.armijo_beta) {
                        Some(a) => a,
                        None => {
                            // a descent direction along which no decrease is
                            // measurable means F is at its rounding floor
                            let slope = numerics::dot(&grad_full, &dx);
                            if !(slope < 0.0) {
                                return Err(SolveError::Stall { iteration: k, slope });
                            }
                            0.0
                        }
                    }
                }
            },
        };
        // an exact line search that cannot leave x has nowhere left to go
        let stop = stop.or((alpha == 0.0).then_some(Termination::Stalled));

        record.alpha = alpha;
        observer(&IterationView {
            k,
            x: &x,
            s: &s,
            grad_f: &grad_f,
            objective,
            surrogate_gap: gap,
            alpha,
        });
        if cfg.record_trace || stop.is_some() {
            trace.push(record);
        }
        if let Some(termination) = stop {
            return Ok(SolveResult {
                x_final: x,
                trace,
                termination,
            });
        }
        numerics::axpy(alpha, &dx, &mut x);
    }
    unreachable!("iteration counter overflowed")
}

/// Classic conditional gradient expressed as a split objective: the whole
/// of `F` is linearized (`g ≡ 0`) and the oracle is a linear minimizer.
pub struct ClassicCg<'a, O: ?Sized, L> {
    inner: &'a O,
    lmo: L,
}

/// Wraps `inner` and a linear minimization oracle so that [`solve`] runs
/// textbook Frank-Wolfe; the recorded gap is then the classic duality gap
/// `-⟨∇F(x), s - x⟩`.
pub fn cg_adapter<O, L>(inner: &O, lmo: L) -> ClassicCg<'_, O, L>
where
    O: SplitObjective + ?Sized,
    L: Fn(&[f64]) -> Result<Vec<f64>, OracleError>,
{
    ClassicCg { inner, lmo }
}

impl<O, L> SplitObjective for ClassicCg<'_, O, L>
where
    O: SplitObjective + ?Sized,
    L: Fn(&[f64]) -> Result<Vec<f64>, OracleError>,
{
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn f(&self, x: &[f64]) -> f64 {
        self.inner.objective(x)
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.inner.grad(x)
    }

    fn g(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(vec![0.0; x.len()])
    }

    fn partial_oracle(&self, _x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        (self.lmo)(grad_f)
    }

    fn exact_step(&self, x: &[f64], dx: &[f64]) -> Option<f64> {
        self.inner.exact_step(x, dx)
    }

    fn residual(&self, x: &[f64]) -> Option<f64> {
        self.inner.residual(x)
    }
}

/// Sampled lower estimate of the curvature constant
/// `max 2[F(x + α(s - x)) - F(x) - α⟨∇F(x), s - x⟩] / α²`.
///
/// `sampler` draws feasible pairs `(x, s)`; every `α` in `alphas` must lie in
/// `(0, 1]`. The estimate never exceeds the true constant.
pub fn estimate_curvature<O, S>(
    obj: &O,
    mut sampler: S,
    rng: &mut Rng,
    n_samples: usize,
    alphas: &[f64],
) -> Result<f64, OracleError>
where
    O: SplitObjective + ?Sized,
    S: FnMut(&mut Rng) -> (Vec<f64>, Vec<f64>),
{
    if n_samples == 0 {
        return Err("estimate_curvature needs at least one sample".into());
    }
    let mut best: f64 = 0.0;
    for _ in 0..n_samples {
        let (x, s) = sampler(rng);
        let d = numerics::sub(&s, &x);
        let fx = obj.objective(&x);
        let slope = numerics::dot(&obj.grad(&x)?, &d);
        let mut buf = vec![0.0; x.len()];
        for &a in alphas {
            if !(a > 0.0 && a <= 1.0) {
                return Err(format!("curvature grid value {a} outside (0, 1]").into());
            }
            step_point(&x, &d, a, &mut buf);
            let excess = obj.objective(&buf) - fx - a * slope;
            best = best.max(2.0 * excess / (a * a));
        }
    }
    Ok(best)
}

/// Optimality report at a point: the surrogate gap and how far the oracle
/// moves away from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub gap: f64,
    pub step_inf: f64,
}

/// Both components vanish at a minimizer; `step_inf` may stay positive at
/// an optimum only when the subproblem has several minimizers.
pub fn check_fixed_point<O: SplitObjective + ?Sized>(obj: &O, x: &[f64]) -> Result<FixedPointReport, OracleError> {
    let grad_f = obj.grad_f(x)?;
    let s = obj.partial_oracle(x, &grad_f)?;
    Ok(FixedPointReport {
        gap: surrogate_gap(obj, x, &s, &grad_f),
        step_inf: norm_inf(&numerics::sub(&s, x)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::{BoxQuadratic, L1Quadratic};
    use approx::assert_abs_diff_eq;

    fn one_d() -> BoxQuadratic {
        // f(x) = x², g = 0 on [-1, 1]
        BoxQuadratic::new(vec![2.0], vec![0.0], 0.0, 1.0)
    }

    #[test]
    fn fixed_steps() {
        assert_eq!(step_fixed(0), 1.0);
        assert_eq!(step_fixed(2), 0.5);
        assert_eq!(step_fixed(8), 0.2);
    }

    #[test]
    fn gap_of_one_d_quadratic() {
        let p = one_d();
        let x = [1.0];
        let gf = p.grad_f(&x).unwrap();
        let s = p.partial_oracle(&x, &gf).unwrap();
        assert_eq!(s, vec![-1.0]);
        assert_abs_diff_eq!(surrogate_gap(&p, &x, &s, &gf), 4.0, epsilon = 1e-15);
        // true suboptimality is 1
        assert!(p.objective(&x) - p.optimal_value() <= 4.0);
        let rep = check_fixed_point(&p, &x).unwrap();
        assert_abs_diff_eq!(rep.gap, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn gap_ignores_constant_in_g() {
        let p = BoxQuadratic::new(vec![1.0, 3.0], vec![0.2, -0.4], 0.5, 1.0);
        let shifted = crate::toy::Shifted { inner: &p, shift: 17.0 };
        let x = [0.3, 0.9];
        let gf = p.grad_f(&x).unwrap();
        let s = p.partial_oracle(&x, &gf).unwrap();
        assert_abs_diff_eq!(
            surrogate_gap(&p, &x, &s, &gf),
            surrogate_gap(&shifted, &x, &s, &gf),
            epsilon = 1e-12
        );
    }

    #[test]
    fn gap_zero_at_minimizer() {
        let p = BoxQuadratic::new(vec![1.0, 3.0], vec![0.2, -4.0], 0.5, 1.0);
        let xs = p.minimizer();
        let rep = check_fixed_point(&p, &xs).unwrap();
        assert!(rep.gap <= 1e-10);
        assert!(rep.step_inf <= 1e-6);
    }

    #[test]
    fn exact_step_quadratic() {
        // F(x) = x² along x = 1, dx = -8 → minimizer α* = 1/8; use dx = -4 for α* = 0.25
        let p = BoxQuadratic::new(vec![2.0], vec![0.0], 0.0, 10.0);
        let a = step_exact(&p, &[1.0], &[-4.0]).unwrap();
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-8);
        assert_eq!(step_exact(&p, &[1.0], &[0.0]).unwrap(), 0.0);
        assert_eq!(step_exact(&p, &[1.0], &[-0.5]).unwrap(), 1.0);
    }

    #[test]
    fn armijo_examples() {
        let p = BoxQuadratic::new(vec![2.0], vec![0.0], 0.0, 10.0);
        let x = [1.0];
        let g = p.grad(&x).unwrap();
        assert_eq!(step_armijo(&p, &x, &[-2.0], &g, 1e-4, 0.5), Some(0.5));
        assert_eq!(step_armijo(&p, &x, &[0.0], &g, 1e-4, 0.5), Some(1.0));

        let lin = crate::toy::Linear { c: vec![1.0, -2.0] };
        let x = [0.0, 0.0];
        let g = lin.grad(&x).unwrap();
        assert_eq!(step_armijo(&lin, &x, &[-1.0, 1.0], &g, 1e-4, 0.5), Some(1.0));
        // ascent direction never qualifies
        assert_eq!(step_armijo(&lin, &x, &[1.0, -1.0], &g, 1e-4, 0.5), None);
    }

    #[test]
    fn l1_quadratic_converges() {
        let p = L1Quadratic::new(vec![0.0, 0.0], 1.0);
        let res = solve(
            &p,
            &[1.0, 0.0],
            &SolverConfig::default().with_gap_tol(1e-10).with_max_iter(100),
        )
        .unwrap();
        assert!(res.last().surrogate_gap <= 1e-10);
        assert!(res.iterations() <= 100);
        assert!(norm_inf(&res.x_final) <= 1e-5);
    }

    #[test]
    fn optimal_start_returns_immediately() {
        let p = BoxQuadratic::new(vec![1.0, 3.0], vec![0.2, -0.4], 0.5, 1.0);
        let xs = p.minimizer();
        let res = solve(&p, &xs, &SolverConfig::default()).unwrap();
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.termination, Termination::GapTol);
        assert_eq!(res.x_final, xs);
    }

    struct Bogus {
        sign: f64,
    }
    impl SplitObjective for Bogus {
        fn dim(&self) -> usize {
            1
        }
        fn f(&self, x: &[f64]) -> f64 {
            x[0] * x[0]
        }
        fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
            Ok(vec![self.sign * 2.0 * x[0]])
        }
        fn g(&self, _: &[f64]) -> f64 {
            0.0
        }
        fn grad_g(&self, _: &[f64]) -> Result<Vec<f64>, OracleError> {
            Ok(vec![0.0])
        }
        fn partial_oracle(&self, x: &[f64], _: &[f64]) -> Result<Vec<f64>, OracleError> {
            Ok(vec![x[0] + 1.0])
        }
    }

    #[test]
    fn armijo_on_ascent_direction_is_an_error() {
        let cfg = SolverConfig {
            gap_tol: 0.0,
            ..SolverConfig::default().with_step(StepRule::Armijo)
        };
        let err = solve(&Bogus { sign: 1.0 }, &[1.0], &cfg).unwrap_err();
        assert!(matches!(err, SolveError::Stall { iteration: 0, .. }), "{err}");
    }

    #[test]
    fn armijo_without_measurable_decrease_stalls() {
        // the gradient sign is wrong, so the claimed descent never shows up
        let cfg = SolverConfig::default().with_step(StepRule::Armijo);
        let res = solve(&Bogus { sign: -1.0 }, &[1.0], &cfg).unwrap();
        assert_eq!(res.termination, Termination::Stalled);
        assert_eq!(res.x_final, vec![1.0]);
    }

    #[test]
    fn oracle_failure_carries_iteration() {
        struct Failing;
        impl SplitObjective for Failing {
            fn dim(&self) -> usize {
                1
            }
            fn f(&self, x: &[f64]) -> f64 {
                x[0]
            }
            fn grad_f(&self, _: &[f64]) -> Result<Vec<f64>, OracleError> {
                Ok(vec![1.0])
            }
            fn g(&self, _: &[f64]) -> f64 {
                0.0
            }
            fn grad_g(&self, _: &[f64]) -> Result<Vec<f64>, OracleError> {
                Ok(vec![0.0])
            }
            fn partial_oracle(&self, x: &[f64], _: &[f64]) -> Result<Vec<f64>, OracleError> {
                if x[0] < 0.5 {
                    Err("out of range".into())
                } else {
                    Ok(vec![0.0])
                }
            }
        }
        let cfg = SolverConfig::default().with_step(StepRule::Fixed);
        let err = solve(&Failing, &[1.0], &cfg).unwrap_err();
        assert!(matches!(err, SolveError::Oracle { iteration: 1, .. }), "{err}");
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().with_max_iter(0).validate().is_err());
        assert!(SolverConfig::default().with_gap_tol(-1.0).validate().is_err());
        let cfg = SolverConfig {
            armijo_beta: 1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let p = one_d();
        assert!(matches!(
            solve(&p, &[0.0, 0.0], &SolverConfig::default()),
            Err(SolveError::Dimension { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn curvature_estimates() {
        let p = one_d();
        let alphas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let mut rng = Rng::new(3);
        let sampler = |r: &mut Rng| (vec![r.uniform_in(-1.0, 1.0)], vec![r.uniform_in(-1.0, 1.0)]);
        let c = estimate_curvature(&p, sampler, &mut rng, 2000, &alphas).unwrap();
        assert!(c <= 8.0 + 1e-9 && c > 7.5, "C_hat = {c}");
        // endpoints reach the analytic constant exactly
        let c = estimate_curvature(&p, |_| (vec![-1.0], vec![1.0]), &mut rng, 1, &alphas).unwrap();
        assert_abs_diff_eq!(c, 8.0, epsilon = 1e-9);

        let lin = crate::toy::Linear { c: vec![1.0, -2.0] };
        let c = estimate_curvature(
            &lin,
            |r: &mut Rng| (r.normal_vec(2), r.normal_vec(2)),
            &mut rng,
            50,
            &alphas,
        )
        .unwrap();
        assert!(c.abs() < 1e-9);

        let doubled = BoxQuadratic::new(vec![4.0], vec![0.0], 0.0, 1.0);
        let pair = |_: &mut Rng| (vec![-0.3], vec![0.9]);
        let c1 = estimate_curvature(&p, pair, &mut rng, 1, &alphas).unwrap();
        let c2 = estimate_curvature(&doubled, pair, &mut rng, 1, &alphas).unwrap();
        assert_abs_diff_eq!(c2, 2.0 * c1, epsilon = 1e-9);
    }

    #[test]
    fn adapter_matches_partial_oracle_when_g_vanishes() {
        let p = L1Quadratic::new(vec![0.3, -0.2, 0.1], 1.0);
        let cg = p.classic();
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let x = p.random_feasible(&mut rng);
            let gf = p.grad_f(&x).unwrap();
            assert_eq!(p.partial_oracle(&x, &gf).unwrap(), cg.partial_oracle(&x, &gf).unwrap());
        }
    }
}
