//! Sinkhorn-Knopp scaling for
//!
//! ```text
//! min ⟨γ, C⟩ + λ Σ γᵢⱼ log γᵢⱼ   s.t.  γ1 = μs, γᵀ1 = μt
//! ```
//!
//! whose solution is `diag(u) K diag(v)` with `K = exp(-C/λ - 1)`. When `K`
//! underflows or the scalings blow up, the iteration restarts in the
//! log-stabilized form: dual potentials are kept separately and absorbed
//! into the kernel whenever the scalings leave a safe range.
//!
//! For small `λ` relative to the cost range the scaling iteration converges
//! slowly. If it has not met the tolerance after a few hundred sweeps, Newton's
//! method on the smooth dual is tried from the current potentials; on failure
//! the scaling simply continues.

use thiserror::Error;

use super::{Histogram, TransportPlan};
use crate::numerics::{cholesky_solve, Mat};

pub const SINKHORN_TOL: f64 = 1e-9;
pub const SINKHORN_MAX_ITER: usize = 10_000;
/// Entries are floored here so `log γ` stays finite.
pub const SINKHORN_FLOOR: f64 = 1e-299;
/// Scalings outside `[1/ABSORB, ABSORB]` are folded into the potentials.
const ABSORB: f64 = 1e30;
/// Sweeps after which (and every `NEWTON_EVERY` after that) Newton is tried.
const NEWTON_FIRST: usize = 200;
const NEWTON_EVERY: usize = 1000;
const NEWTON_MAX_STEPS: usize = 60;
/// Newton systems above this size are not attempted.
const NEWTON_MAX_DIM: usize = 3000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SinkhornError {
    #[error("entropic weight must be positive, got {0}")]
    Lambda(f64),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("cost is {rows}x{cols} but marginals have lengths {ns} and {nt}")]
    Dimension {
        rows: usize,
        cols: usize,
        ns: usize,
        nt: usize,
    },
    #[error("non-finite cost entry at ({row}, {col})")]
    NonFiniteCost { row: usize, col: usize },
    #[error("Sinkhorn did not reach tolerance in {iterations} iterations (marginal violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornParams {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SinkhornParams {
    fn default() -> Self {
        Self {
            tol: SINKHORN_TOL,
            max_iter: SINKHORN_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SinkhornReport {
    pub plan: TransportPlan,
    pub iterations: usize,
    pub violation: f64,
    pub log_domain: bool,
    /// Newton steps taken after scaling; 0 if scaling converged alone.
    pub newton_steps: usize,
}

/// Entropic transport plan for `cost_adj`; see [`sinkhorn_report`].
pub fn sinkhorn(
    cost_adj: &Mat,
    mu_s: &Histogram,
    mu_t: &Histogram,
    lambda_ent: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TransportPlan, SinkhornError> {
    sinkhorn_report(
        cost_adj,
        mu_s.weights(),
        mu_t.weights(),
        lambda_ent,
        SinkhornParams { tol, max_iter },
    )
    .map(|r| r.plan)
}

/// Scaling iterations until `max(‖γ1 - μs‖∞, ‖γᵀ1 - μt‖∞) ≤ tol`.
pub fn sinkhorn_report(
    cost: &Mat,
    mu_s: &[f64],
    mu_t: &[f64],
    lambda: f64,
    params: SinkhornParams,
) -> Result<SinkhornReport, SinkhornError> {
    let (r, c) = cost.shape();
    if !(lambda > 0.0) {
        return Err(SinkhornError::Lambda(lambda));
    }
    if !(params.tol > 0.0) {
        return Err(SinkhornError::Tolerance(params.tol));
    }
    if mu_s.len() != r || mu_t.len() != c || r == 0 || c == 0 {
        return Err(SinkhornError::Dimension {
            rows: r,
            cols: c,
            ns: mu_s.len(),
            nt: mu_t.len(),
        });
    }
    if let Some(pos) = cost.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(SinkhornError::NonFiniteCost {
            row: pos / c,
            col: pos % c,
        });
    }

    // a global shift only rescales u
    let cmin = cost.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let plain = Scaling::new(cost, lambda, vec![cmin; r], vec![0.0; c]);
    if !plain.has_underflow() {
        match plain.run(mu_s, mu_t, params, false) {
            Outcome::Converged(report) => return Ok(report),
            Outcome::Failed { iterations, violation } => {
                return Err(SinkhornError::NotConverged { iterations, violation })
            }
            Outcome::Unstable => {}
        }
    }

    // log-stabilized restart from reduced-cost potentials so every row and
    // column keeps at least one unit kernel entry
    let f: Vec<f64> = (0..r)
        .map(|i| cost.row(i).iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let g: Vec<f64> = (0..c)
        .map(|j| (0..r).map(|i| cost[(i, j)] - f[i]).fold(f64::INFINITY, f64::min))
        .collect();
    match Scaling::new(cost, lambda, f, g).run(mu_s, mu_t, params, true) {
        Outcome::Converged(report) => Ok(report),
        Outcome::Failed { iterations, violation } => Err(SinkhornError::NotConverged { iterations, violation }),
        Outcome::Unstable => Err(SinkhornError::NotConverged {
            iterations: params.max_iter,
            violation: f64::INFINITY,
        }),
    }
}

enum Outcome {
    Converged(SinkhornReport),
    Failed { iterations: usize, violation: f64 },
    Unstable,
}

/// Kernel `exp((fᵢ + gⱼ - cᵢⱼ)/λ - 1)` around potentials `f`, `g`.
struct Scaling<'a> {
    cost: &'a Mat,
    lambda: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    kernel: Mat,
}

impl<'a> Scaling<'a> {
    fn new(cost: &'a Mat, lambda: f64, f: Vec<f64>, g: Vec<f64>) -> Self {
        let kernel = Self::build_kernel(cost, lambda, &f, &g);
        Self {
            cost,
            lambda,
            f,
            g,
            kernel,
        }
    }

    fn build_kernel(cost: &Mat, lambda: f64, f: &[f64], g: &[f64]) -> Mat {
        Mat::from_fn(cost.rows(), cost.cols(), |i, j| {
            ((f[i] + g[j] - cost[(i, j)]) / lambda - 1.0).exp()
        })
    }

    fn has_underflow(&self) -> bool {
        self.kernel.as_slice().iter().any(|&k| k == 0.0 || !k.is_finite())
    }

    fn absorb(&mut self, u: &mut [f64], v: &mut [f64]) {
        for (fi, ui) in self.f.iter_mut().zip(u.iter_mut()) {
            *fi += self.lambda * ui.ln();
            *ui = 1.0;
        }
        for (gj, vj) in self.g.iter_mut().zip(v.iter_mut()) {
            *gj += self.lambda * vj.ln();
            *vj = 1.0;
        }
        self.kernel = Self::build_kernel(self.cost, self.lambda, &self.f, &self.g);
    }

    fn run(mut self, mu_s: &[f64], mu_t: &[f64], params: SinkhornParams, stabilize: bool) -> Outcome {
        let (r, c) = self.kernel.shape();
        let mut u = vec![1.0; r];
        let mut v = vec![1.0; c];
        // v is fresh once it has been fitted against the current kernel
        let mut fresh = false;
        let mut violation = f64::INFINITY;

        for it in 0..params.max_iter {
            let kv = self.kernel.matvec(&v);
            if fresh {
                violation = u
                    .iter()
                    .zip(&kv)
                    .zip(mu_s)
                    .fold(0.0, |m, ((ui, k), mu)| f64::max(m, (ui * k - mu).abs()));
                if violation <= params.tol {
                    return Outcome::Converged(self.finish(&u, &v, mu_s, mu_t, it, stabilize));
                }
            }
            for ((ui, k), mu) in u.iter_mut().zip(&kv).zip(mu_s) {
                *ui = mu / k;
            }
            let ktu = self.kernel.matvec_t(&u);
            for ((vj, k), mu) in v.iter_mut().zip(&ktu).zip(mu_t) {
                *vj = mu / k;
            }
            fresh = true;

            let out_of_range = u
                .iter()
                .chain(&v)
                .any(|&s| !s.is_finite() || s == 0.0 || !(1.0 / ABSORB..=ABSORB).contains(&s));
            if out_of_range {
                if !stabilize {
                    return Outcome::Unstable;
                }
                if u.iter().chain(&v).any(|&s| !s.is_finite() || s == 0.0) {
                    return Outcome::Unstable;
                }
                self.absorb(&mut u, &mut v);
                fresh = false;
            }

            let sweeps = it + 1;
            let due = sweeps == NEWTON_FIRST
                || (sweeps > NEWTON_FIRST && (sweeps - NEWTON_FIRST).is_multiple_of(NEWTON_EVERY));
            if due && r + c - 1 <= NEWTON_MAX_DIM {
                let f: Vec<f64> = self.f.iter().zip(&u).map(|(f, u)| f + self.lambda * u.ln()).collect();
                let g: Vec<f64> = self.g.iter().zip(&v).map(|(g, v)| g + self.lambda * v.ln()).collect();
                if let Some((polished, steps)) = newton(self.cost, self.lambda, mu_s, mu_t, f, g, params.tol) {
                    let ones_r = vec![1.0; r];
                    let ones_c = vec![1.0; c];
                    let mut report = polished.finish(&ones_r, &ones_c, mu_s, mu_t, sweeps, stabilize);
                    report.newton_steps = steps;
                    return Outcome::Converged(report);
                }
            }
        }
        Outcome::Failed {
            iterations: params.max_iter,
            violation,
        }
    }

    fn finish(
        &self,
        u: &[f64],
        v: &[f64],
        mu_s: &[f64],
        mu_t: &[f64],
        iterations: usize,
        log_domain: bool,
    ) -> SinkhornReport {
        let (r, c) = self.kernel.shape();
        let gamma = Mat::from_fn(r, c, |i, j| (u[i] * self.kernel[(i, j)] * v[j]).max(SINKHORN_FLOOR));
        let plan = TransportPlan::from_mat_unchecked(gamma);
        let violation = plan.marginal_violation(mu_s, mu_t);
        SinkhornReport {
            plan,
            iterations,
            violation,
            log_domain,
            newton_steps: 0,
        }
    }
}

fn dual_value(kernel: &Mat, lambda: f64, f: &[f64], g: &[f64], mu_s: &[f64], mu_t: &[f64]) -> f64 {
    let mass: f64 = kernel.as_slice().iter().sum();
    crate::numerics::dot(mu_s, f) + crate::numerics::dot(mu_t, g) - lambda * mass
}

fn marginal_residuals(kernel: &Mat, mu_s: &[f64], mu_t: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let rs: Vec<f64> = mu_s.iter().zip(kernel.row_sums()).map(|(a, p)| a - p).collect();
    let cs: Vec<f64> = mu_t.iter().zip(kernel.col_sums()).map(|(b, p)| b - p).collect();
    let worst = rs.iter().chain(&cs).fold(0.0, |m: f64, x| m.max(x.abs()));
    (rs, cs, worst)
}

/// Damped Newton ascent on the entropic dual
/// `⟨μs, f⟩ + ⟨μt, g⟩ - λ Σ exp((fᵢ + gⱼ - cᵢⱼ)/λ - 1)` with the last `g`
/// held fixed. A step is accepted when it raises the dual or shrinks the
/// marginal residual; `None` means no acceptable step or no convergence.
fn newton<'a>(
    cost: &'a Mat,
    lambda: f64,
    mu_s: &[f64],
    mu_t: &[f64],
    f: Vec<f64>,
    g: Vec<f64>,
    tol: f64,
) -> Option<(Scaling<'a>, usize)> {
    let (r, c) = cost.shape();
    let n = r + c - 1;
    let mut cur = Scaling::new(cost, lambda, f, g);
    if cur.kernel.as_slice().iter().any(|k| !k.is_finite()) {
        return None;
    }
    let mut value = dual_value(&cur.kernel, lambda, &cur.f, &cur.g, mu_s, mu_t);
    let (mut rs, mut cs, mut worst) = marginal_residuals(&cur.kernel, mu_s, mu_t);
    for step in 0..NEWTON_MAX_STEPS {
        if worst <= tol {
            return Some((cur, step));
        }
        let p = &cur.kernel;
        let rows = p.row_sums();
        let cols = p.col_sums();
        let mut h = Mat::zeros(n, n);
        for i in 0..r {
            h[(i, i)] = rows[i];
            for j in 0..c - 1 {
                h[(i, r + j)] = p[(i, j)];
                h[(r + j, i)] = p[(i, j)];
            }
        }
        for j in 0..c - 1 {
            h[(r + j, r + j)] = cols[j];
        }
        let ridge = 1e-14 * rows.iter().chain(&cols).fold(0.0, |m: f64, &x| m.max(x));
        for k in 0..n {
            h[(k, k)] += ridge;
        }
        let rhs: Vec<f64> = rs.iter().chain(&cs[..c - 1]).map(|x| lambda * x).collect();
        let delta = cholesky_solve(&h, &rhs)?;
        let slope = crate::numerics::dot(&delta, &rhs) / lambda;
        if !(slope > 0.0) || delta.iter().any(|d| !d.is_finite()) {
            return None;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let nf: Vec<f64> = cur.f.iter().zip(&delta[..r]).map(|(f, d)| f + t * d).collect();
            let mut ng = cur.g.clone();
            for (gj, d) in ng.iter_mut().zip(&delta[r..]) {
                *gj += t * d;
            }
            let trial = Scaling::new(cost, lambda, nf, ng);
            if trial.kernel.as_slice().iter().all(|k| k.is_finite()) {
                let nv = dual_value(&trial.kernel, lambda, &trial.f, &trial.g, mu_s, mu_t);
                let (nrs, ncs, nworst) = marginal_residuals(&trial.kernel, mu_s, mu_t);
                if nv.is_finite() && (nv >= value + 1e-4 * t * slope || nworst < (1.0 - 1e-4 * t) * worst) {
                    accepted = Some((trial, nv, nrs, ncs, nworst));
                    break;
                }
            }
            t *= 0.5;
        }
        let (trial, nv, nrs, ncs, nworst) = accepted?;
        cur = trial;
        value = nv;
        rs = nrs;
        cs = ncs;
        worst = nworst;
    }
    (worst <= tol).then_some((cur, NEWTON_MAX_STEPS))
}
