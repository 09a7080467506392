//! Projected-gradient baselines over the L1 ball.
//!
//! Both record the same trace as the splitting solver: objective, the
//! splitting gap at the iterate, the accepted step and the fixed-point
//! residual, and stop on the same tolerances.

use std::collections::VecDeque;
use std::time::Instant;

use super::{project_l1, ElasticNetProblem};
use crate::gcg::{surrogate_gap, IterationRecord, SolveError, SolveResult, SolverConfig, Termination, ARMIJO_MIN_STEP};
use crate::numerics::{self, norm_inf};

/// Nonmonotone line-search memory.
pub const SPG_MEMORY: usize = 10;
pub const SPG_STEP_MIN: f64 = 1e-10;
pub const SPG_STEP_MAX: f64 = 1e10;

struct Tracker<'a> {
    problem: &'a ElasticNetProblem,
    cfg: &'a SolverConfig,
    start: Instant,
    trace: Vec<IterationRecord>,
    gap_threshold: f64,
}

impl<'a> Tracker<'a> {
    fn new(problem: &'a ElasticNetProblem, cfg: &'a SolverConfig) -> Self {
        Self {
            problem,
            cfg,
            start: Instant::now(),
            trace: Vec::new(),
            gap_threshold: cfg.gap_tol,
        }
    }

    /// Records iterate `k` and decides whether to stop there.
    fn check(&mut self, k: usize, x: &[f64], fx: f64, grad_full: &[f64]) -> Result<Option<Termination>, SolveError> {
        let p = self.problem;
        let gf = p.loss_grad(x);
        let s = p.en_oracle(&gf);
        let gap = surrogate_gap(p, x, &s, &gf);
        if k == 0 && self.cfg.gap_relative {
            self.gap_threshold = self.cfg.gap_tol * gap;
        }
        let residual = p.fixed_point_residual_with(x, grad_full);
        let record = IterationRecord {
            k,
            objective: fx,
            surrogate_gap: gap,
            alpha: 0.0,
            elapsed_s: self.start.elapsed().as_secs_f64(),
            extra_residual: Some(residual),
        };
        if !fx.is_finite() {
            return Err(SolveError::NonFinite { record });
        }
        let stop = if self.cfg.gap_tol > 0.0 && gap <= self.gap_threshold {
            Some(Termination::GapTol)
        } else if self.cfg.residual_tol.is_some_and(|t| residual <= t) {
            Some(Termination::ResidualTol)
        } else if k >= self.cfg.max_iter {
            Some(Termination::MaxIter)
        } else {
            None
        };
        if self.cfg.record_trace || stop.is_some() {
            self.trace.push(record);
        }
        Ok(stop)
    }

    fn set_alpha(&mut self, k: usize, alpha: f64) {
        if let Some(last) = self.trace.last_mut().filter(|r| r.k == k) {
            last.alpha = alpha;
        }
    }

    fn finish(self, x: Vec<f64>, termination: Termination) -> SolveResult {
        SolveResult {
            x_final: x,
            trace: self.trace,
            termination,
        }
    }
}

fn check_start(problem: &ElasticNetProblem, x0: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>, SolveError> {
    cfg.validate()?;
    if x0.len() != problem.n_features() {
        return Err(SolveError::Dimension {
            expected: problem.n_features(),
            got: x0.len(),
        });
    }
    Ok(project_l1(x0, problem.tau()))
}

/// Spectral projected gradient with a Barzilai-Borwein step and a
/// nonmonotone (max over the last [`SPG_MEMORY`] values) Armijo search.
pub fn spg_solve(problem: &ElasticNetProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let tau = problem.tau();
    let mut x = check_start(problem, x0, cfg)?;
    let mut fx = problem.objective_value(&x);
    let mut grad = problem.full_grad(&x);
    let mut tracker = Tracker::new(problem, cfg);

    // also the fallback when curvature along the last step is not positive
    let safe_step = |x: &[f64], grad: &[f64]| {
        let pg = norm_inf(&numerics::sub(&project_l1(&numerics::sub(x, grad), tau), x));
        if pg > 0.0 {
            (1.0 / pg).clamp(SPG_STEP_MIN, SPG_STEP_MAX)
        } else {
            1.0
        }
    };
    let mut spectral = safe_step(&x, &grad);
    let mut history: VecDeque<f64> = VecDeque::with_capacity(SPG_MEMORY);

    for k in 0.. {
        if let Some(t) = tracker.check(k, &x, fx, &grad)? {
            return Ok(tracker.finish(x, t));
        }
        if history.len() == SPG_MEMORY {
            history.pop_front();
        }
        history.push_back(fx);
        let f_ref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let trial: Vec<f64> = x.iter().zip(&grad).map(|(x, g)| x - spectral * g).collect();
        let d = numerics::sub(&project_l1(&trial, tau), &x);
        let slope = numerics::dot(&grad, &d);

        let mut alpha = 1.0;
        let (x_new, f_new) = loop {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(x, d)| x + alpha * d).collect();
            let f_cand = problem.objective_value(&cand);
            if f_cand <= f_ref + cfg.armijo_sigma * alpha * slope {
                break (cand, f_cand);
            }
            // safeguarded quadratic interpolation
            let denom = 2.0 * (f_cand - fx - alpha * slope);
            let a_q = if denom > 0.0 {
                -slope * alpha * alpha / denom
            } else {
                -1.0
            };
            alpha = if a_q >= 0.1 * alpha && a_q <= 0.9 * alpha {
                a_q
            } else {
                0.5 * alpha
            };
            if alpha < ARMIJO_MIN_STEP {
                if slope < 0.0 {
                    return Ok(tracker.finish(x, Termination::Stalled));
                }
                return Err(SolveError::Stall { iteration: k, slope });
            }
        };
        tracker.set_alpha(k, alpha);

        let grad_new = problem.full_grad(&x_new);
        let s_vec = numerics::sub(&x_new, &x);
        let y_vec = numerics::sub(&grad_new, &grad);
        let sty = numerics::dot(&s_vec, &y_vec);
        spectral = if sty <= 0.0 {
            safe_step(&x_new, &grad_new)
        } else {
            (numerics::norm2_sq(&s_vec) / sty).clamp(SPG_STEP_MIN, SPG_STEP_MAX)
        };
        x = x_new;
        fx = f_new;
        grad = grad_new;
    }
    unreachable!("iteration counter overflowed")
}

/// Projected gradient along `d = Π(x - ∇F(x)) - x` with monotone Armijo
/// backtracking.
pub fn pg_solve(problem: &ElasticNetProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    let tau = problem.tau();
    let mut x = check_start(problem, x0, cfg)?;
    let mut fx = problem.objective_value(&x);
    let mut grad = problem.full_grad(&x);
    let mut tracker = Tracker::new(problem, cfg);

    for k in 0.. {
        if let Some(t) = tracker.check(k, &x, fx, &grad)? {
            return Ok(tracker.finish(x, t));
        }
        let d = numerics::sub(&project_l1(&numerics::sub(&x, &grad), tau), &x);
        let slope = numerics::dot(&grad, &d);
        let mut alpha = 1.0;
        let (x_new, f_new) = loop {
            let cand: Vec<f64> = x.iter().zip(&d).map(|(x, d)| x + alpha * d).collect();
            let f_cand = problem.objective_value(&cand);
            if f_cand <= fx + cfg.armijo_sigma * alpha * slope {
                break (cand, f_cand);
            }
            alpha *= cfg.armijo_beta;
            if alpha < ARMIJO_MIN_STEP {
                if slope < 0.0 {
                    return Ok(tracker.finish(x, Termination::Stalled));
                }
                return Err(SolveError::Stall { iteration: k, slope });
            }
        };
        tracker.set_alpha(k, alpha);
        x = x_new;
        fx = f_new;
        grad = problem.full_grad(&x);
    }
    unreachable!("iteration counter overflowed")
}
