//! Optimal transport with entropic and Laplacian regularization:
//!
//! ```text
//! min_γ ⟨γ, C⟩ + λ₁ Σ γᵢⱼ log γᵢⱼ + λ₂ Ω_Lap(γ)
//! s.t.  γ ≥ 0, γ1 = μs, γᵀ1 = μt
//! Ω_Lap(γ) = λs Tr(Xtᵀ γᵀ Ls γ Xt) + λt Tr(Xsᵀ γ Lt γᵀ Xs)
//! ```
//!
//! The smooth part `f = ⟨γ, C⟩ + λ₂ Ω_Lap` is linearized and the entropy is
//! kept, so each splitting step is one Sinkhorn solve on the adjusted cost
//! `C + λ₂ ∇Ω_Lap(γₖ)`. The classic conditional-gradient baseline instead
//! solves an exact linear transport problem per step.

mod data;
mod graph;
mod io;
mod simplex;
mod sinkhorn;

pub use data::{make_cluster_data, ClusterData, DEFAULT_POSITION_SCALE};
pub use graph::{gershgorin_lower_bound, knn_laplacian};
pub use io::{read_matrix_csv, read_problem, write_matrix_csv, write_problem};
pub use simplex::{transport_lmo, transport_simplex, SimplexError, SimplexSolution};
pub use sinkhorn::{
    sinkhorn, sinkhorn_report, SinkhornError, SinkhornParams, SinkhornReport, SINKHORN_FLOOR, SINKHORN_MAX_ITER,
    SINKHORN_TOL,
};

use thiserror::Error;

use crate::gcg::{cg_adapter, OracleError, SplitObjective};
use crate::numerics::{Mat, NumericsError, Rng};

/// Default entropic weight λ₁.
pub const DEFAULT_LAMBDA_ENT: f64 = 1.7e-2;
/// Default Laplacian weight λ₂.
pub const DEFAULT_LAMBDA_LAP: f64 = 1e3;
pub const DEFAULT_NEIGHBORS: usize = 10;

#[derive(Debug, Error)]
pub enum OtError {
    #[error("histogram has a negative or non-finite weight {value} at {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("histogram weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("empty histogram")]
    Empty,
    #[error("transport plan has a negative or non-finite entry {value} at ({row}, {col})")]
    NegativePlan { row: usize, col: usize, value: f64 },
    #[error("negentropy gradient undefined at zero entry ({row}, {col})")]
    NegentropyDomain { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{name} is not a valid Laplacian: {reason}")]
    Laplacian { name: &'static str, reason: String },
    #[error("need 1 <= k < {points} neighbors, got k = {k}")]
    Neighbors { k: usize, points: usize },
    #[error(transparent)]
    Sinkhorn(#[from] SinkhornError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram(Vec<f64>);

impl Histogram {
    pub fn new(weights: Vec<f64>) -> Result<Self, OtError> {
        if weights.is_empty() {
            return Err(OtError::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(OtError::NegativeWeight { index, value });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(OtError::NotNormalized(total));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Random strictly positive histogram.
    pub fn random(rng: &mut Rng, n: usize) -> Self {
        let raw: Vec<f64> = (0..n).map(|_| 0.1 + rng.uniform()).collect();
        let total: f64 = raw.iter().sum();
        Self(raw.iter().map(|v| v / total).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Nonnegative coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    gamma: Mat,
}

impl TransportPlan {
    pub fn new(gamma: Mat) -> Result<Self, OtError> {
        if let Some(pos) = gamma.as_slice().iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(OtError::NegativePlan {
                row: pos / gamma.cols(),
                col: pos % gamma.cols(),
                value: gamma.as_slice()[pos],
            });
        }
        Ok(Self { gamma })
    }

    pub(crate) fn from_mat_unchecked(gamma: Mat) -> Self {
        Self { gamma }
    }

    /// `μs μtᵀ`, always feasible and strictly positive.
    pub fn product(mu_s: &Histogram, mu_t: &Histogram) -> Self {
        let (a, b) = (mu_s.weights(), mu_t.weights());
        Self {
            gamma: Mat::from_fn(a.len(), b.len(), |i, j| a[i] * b[j]),
        }
    }

    pub fn gamma(&self) -> &Mat {
        &self.gamma
    }

    pub fn into_mat(self) -> Mat {
        self.gamma
    }

    /// `max(‖γ1 - μs‖∞, ‖γᵀ1 - μt‖∞)`.
    pub fn marginal_violation(&self, mu_s: &[f64], mu_t: &[f64]) -> f64 {
        marginal_violation(&self.gamma, mu_s, mu_t)
    }
}

pub fn marginal_violation(gamma: &Mat, mu_s: &[f64], mu_t: &[f64]) -> f64 {
    let rows = gamma.row_sums();
    let cols = gamma.col_sums();
    let dev = |sums: &[f64], target: &[f64]| {
        sums.iter()
            .zip(target)
            .fold(0.0, |m, (s, t)| f64::max(m, (s - t).abs()))
    };
    dev(&rows, mu_s).max(dev(&cols, mu_t))
}

/// Everything defining one regularized transport instance.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub cost: Mat,
    pub mu_s: Histogram,
    pub mu_t: Histogram,
    /// Entropic weight λ₁ (> 0).
    pub lambda_ent: f64,
    /// Laplacian weight λ₂ (≥ 0).
    pub lambda_lap: f64,
    pub lap_s: Mat,
    pub lap_t: Mat,
    pub xs: Mat,
    pub xt: Mat,
    /// Inner weights of the two Laplacian terms.
    pub lambda_s: f64,
    pub lambda_t: f64,
}

impl TransportProblem {
    /// Entropic transport only: no Laplacian term.
    pub fn entropic(cost: Mat, mu_s: Histogram, mu_t: Histogram, lambda_ent: f64) -> Result<Self, OtError> {
        let (r, c) = cost.shape();
        let p = Self {
            cost,
            mu_s,
            mu_t,
            lambda_ent,
            lambda_lap: 0.0,
            lap_s: Mat::zeros(r, r),
            lap_t: Mat::zeros(c, c),
            xs: Mat::zeros(r, 1),
            xt: Mat::zeros(c, 1),
            lambda_s: 1.0,
            lambda_t: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// The cluster experiment: squared-Euclidean cost scaled to a unit
    /// maximum, kNN Laplacians in each domain, and positions multiplied by
    /// `position_scale` inside the Laplacian term.
    pub fn from_clusters(
        data: &ClusterData,
        lambda_ent: f64,
        lambda_lap: f64,
        k: usize,
        position_scale: f64,
    ) -> Result<Self, OtError> {
        if !(position_scale > 0.0) {
            return Err(OtError::Parameter(format!(
                "position scale must be positive, got {position_scale}"
            )));
        }
        let mut cost = squared_distances(&data.xs, &data.xt)?;
        let cmax = cost.max_abs();
        if cmax > 0.0 {
            cost.scale(1.0 / cmax);
        }
        let lap_s = knn_laplacian(&data.xs, k)?;
        let lap_t = knn_laplacian(&data.xt, k)?;
        let mut xs = data.xs.clone();
        let mut xt = data.xt.clone();
        xs.scale(position_scale);
        xt.scale(position_scale);
        let p = Self {
            cost,
            mu_s: data.mu_s.clone(),
            mu_t: data.mu_t.clone(),
            lambda_ent,
            lambda_lap,
            lap_s,
            lap_t,
            xs,
            xt,
            lambda_s: 1.0,
            lambda_t: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.cost.shape()
    }

    pub fn validate(&self) -> Result<(), OtError> {
        let (r, c) = self.cost.shape();
        let dim = |msg: String| Err(OtError::Dimension(msg));
        if self.mu_s.len() != r || self.mu_t.len() != c {
            return dim(format!(
                "cost is {r}x{c}, marginals have lengths {} and {}",
                self.mu_s.len(),
                self.mu_t.len()
            ));
        }
        if self.lap_s.shape() != (r, r) || self.lap_t.shape() != (c, c) {
            return dim(format!(
                "Laplacians are {:?} and {:?}, expected ({r}, {r}) and ({c}, {c})",
                self.lap_s.shape(),
                self.lap_t.shape()
            ));
        }
        if self.xs.rows() != r || self.xt.rows() != c || self.xs.cols() != self.xt.cols() {
            return dim(format!(
                "positions are {:?} and {:?} for a {r}x{c} cost",
                self.xs.shape(),
                self.xt.shape()
            ));
        }
        if let Some(v) = self.cost.as_slice().iter().find(|v| !(**v >= 0.0)) {
            return Err(OtError::Parameter(format!("cost must be nonnegative, found {v}")));
        }
        if !(self.lambda_ent > 0.0) {
            return Err(OtError::Parameter(format!(
                "lambda_ent must be positive, got {}",
                self.lambda_ent
            )));
        }
        for (name, v) in [
            ("lambda_lap", self.lambda_lap),
            ("lambda_s", self.lambda_s),
            ("lambda_t", self.lambda_t),
        ] {
            if !(v >= 0.0) {
                return Err(OtError::Parameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        check_laplacian("lap_s", &self.lap_s)?;
        check_laplacian("lap_t", &self.lap_t)?;
        Ok(())
    }

    pub fn objective(&self, gamma: &Mat) -> f64 {
        ot_objective(gamma, self)
    }

    /// Starting point for solves: the Sinkhorn plan of the unadjusted cost.
    pub fn initial_plan(&self, params: SinkhornParams) -> Result<TransportPlan, OtError> {
        Ok(sinkhorn_report(
            &self.cost,
            self.mu_s.weights(),
            self.mu_t.weights(),
            self.lambda_ent,
            params,
        )?
        .plan)
    }
}

fn check_laplacian(name: &'static str, l: &Mat) -> Result<(), OtError> {
    let bad = |reason: String| Err(OtError::Laplacian { name, reason });
    if !l.is_symmetric(1e-12) {
        return bad("not symmetric".into());
    }
    let scale = l.max_abs().max(1.0);
    if let Some((i, s)) = l.row_sums().iter().enumerate().find(|(_, s)| s.abs() > 1e-9 * scale) {
        return bad(format!("row {i} sums to {s}"));
    }
    let bound = gershgorin_lower_bound(l);
    if bound < -1e-10 {
        return bad(format!(
            "cannot certify positive semidefiniteness (Gershgorin bound {bound})"
        ));
    }
    Ok(())
}

fn squared_distances(a: &Mat, b: &Mat) -> Result<Mat, OtError> {
    if a.cols() != b.cols() {
        return Err(OtError::Dimension(format!(
            "point dimensions differ: {} vs {}",
            a.cols(),
            b.cols()
        )));
    }
    Ok(Mat::from_fn(a.rows(), b.rows(), |i, j| {
        a.row(i)
            .iter()
            .zip(b.row(j))
            .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
    }))
}

/// `Σ γᵢⱼ log γᵢⱼ` with `0 log 0 = 0`.
pub fn negentropy(gamma: &Mat) -> f64 {
    gamma
        .as_slice()
        .iter()
        .fold(0.0, |acc, &g| if g > 0.0 { acc + g * g.ln() } else { acc })
}

/// `1 + log γᵢⱼ`; undefined at zero entries.
pub fn negentropy_grad(gamma: &Mat) -> Result<Mat, OtError> {
    if let Some(pos) = gamma.as_slice().iter().position(|&g| !(g > 0.0)) {
        return Err(OtError::NegentropyDomain {
            row: pos / gamma.cols(),
            col: pos % gamma.cols(),
        });
    }
    Ok(gamma.map(|g| 1.0 + g.ln()))
}

/// `Ω_Lap(γ) = λs Tr(Aᵀ Ls A) + λt Tr(Bᵀ Lt B)` with `A = γ Xt`, `B = γᵀ Xs`.
pub fn laplacian_reg(gamma: &Mat, problem: &TransportProblem) -> Result<f64, OtError> {
    check_plan_shape(gamma, problem)?;
    let a = gamma.matmul(&problem.xt)?;
    let b = gamma.transpose().matmul(&problem.xs)?;
    let quad = |l: &Mat, m: &Mat| -> Result<f64, OtError> { Ok(l.matmul(m)?.frobenius_dot(m)) };
    Ok(problem.lambda_s * quad(&problem.lap_s, &a)? + problem.lambda_t * quad(&problem.lap_t, &b)?)
}

/// `λs (Ls + Lsᵀ) γ Xt Xtᵀ + λt Xs Xsᵀ γ (Lt + Ltᵀ)`, evaluated through the
/// thin products `γ Xt` and `γᵀ Xs`.
pub fn laplacian_reg_grad(gamma: &Mat, problem: &TransportProblem) -> Result<Mat, OtError> {
    check_plan_shape(gamma, problem)?;
    let sym = |l: &Mat| {
        let mut s = l.clone();
        s.add_scaled(1.0, &l.transpose());
        s
    };
    let a = gamma.matmul(&problem.xt)?;
    let b = gamma.transpose().matmul(&problem.xs)?;
    let mut grad = sym(&problem.lap_s).matmul(&a)?.matmul(&problem.xt.transpose())?;
    grad.scale(problem.lambda_s);
    let right = problem.xs.matmul(&sym(&problem.lap_t).matmul(&b)?.transpose())?;
    grad.add_scaled(problem.lambda_t, &right);
    Ok(grad)
}

fn check_plan_shape(gamma: &Mat, problem: &TransportProblem) -> Result<(), OtError> {
    if gamma.shape() != problem.shape() {
        return Err(OtError::Dimension(format!(
            "plan is {:?}, problem is {:?}",
            gamma.shape(),
            problem.shape()
        )));
    }
    Ok(())
}

/// `⟨γ, C⟩ + λ₂ Ω_Lap(γ) + λ₁ Ω_IT(γ)`.
pub fn ot_objective(gamma: &Mat, problem: &TransportProblem) -> f64 {
    smooth_part(gamma, problem) + problem.lambda_ent * negentropy(gamma)
}

fn smooth_part(gamma: &Mat, problem: &TransportProblem) -> f64 {
    let lin = gamma.frobenius_dot(&problem.cost);
    if problem.lambda_lap == 0.0 {
        return lin;
    }
    let lap = laplacian_reg(gamma, problem).expect("plan shape checked by the caller");
    lin + problem.lambda_lap * lap
}

/// The transport problem as a split objective over flattened plans.
#[derive(Debug, Clone)]
pub struct OtSplit<'a> {
    problem: &'a TransportProblem,
    sinkhorn: SinkhornParams,
}

pub fn ot_split(problem: &TransportProblem) -> Result<OtSplit<'_>, OtError> {
    problem.validate()?;
    Ok(OtSplit {
        problem,
        sinkhorn: SinkhornParams::default(),
    })
}

impl<'a> OtSplit<'a> {
    pub fn with_sinkhorn(mut self, params: SinkhornParams) -> Self {
        self.sinkhorn = params;
        self
    }

    pub fn problem(&self) -> &'a TransportProblem {
        self.problem
    }

    fn as_mat(&self, x: &[f64]) -> Mat {
        let (r, c) = self.problem.shape();
        Mat::from_fn(r, c, |i, j| x[i * c + j])
    }

    /// Exact linear minimizer over the transport polytope, for the classic
    /// conditional-gradient baseline.
    pub fn linear_oracle(&self, direction: &[f64]) -> Result<Vec<f64>, OracleError> {
        let plan = transport_lmo(&self.as_mat(direction), &self.problem.mu_s, &self.problem.mu_t)?;
        Ok(plan.into_mat().into_vec())
    }

    /// This problem seen by textbook conditional gradient.
    pub fn classic(&self) -> impl SplitObjective + '_ {
        cg_adapter(self, move |d: &[f64]| self.linear_oracle(d))
    }
}

impl SplitObjective for OtSplit<'_> {
    fn dim(&self) -> usize {
        let (r, c) = self.problem.shape();
        r * c
    }

    fn f(&self, x: &[f64]) -> f64 {
        smooth_part(&self.as_mat(x), self.problem)
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        let mut grad = self.problem.cost.clone();
        if self.problem.lambda_lap != 0.0 {
            let lap = laplacian_reg_grad(&self.as_mat(x), self.problem)?;
            grad.add_scaled(self.problem.lambda_lap, &lap);
        }
        Ok(grad.into_vec())
    }

    fn g(&self, x: &[f64]) -> f64 {
        self.problem.lambda_ent * negentropy(&self.as_mat(x))
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        let mut g = negentropy_grad(&self.as_mat(x))?;
        g.scale(self.problem.lambda_ent);
        Ok(g.into_vec())
    }

    /// Sinkhorn on the adjusted cost, which is exactly `∇f(γ)`.
    fn partial_oracle(&self, _x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        let p = self.problem;
        let rep = sinkhorn_report(
            &self.as_mat(grad_f),
            p.mu_s.weights(),
            p.mu_t.weights(),
            p.lambda_ent,
            self.sinkhorn,
        )?;
        Ok(rep.plan.into_mat().into_vec())
    }

    fn residual(&self, x: &[f64]) -> Option<f64> {
        let p = self.problem;
        Some(marginal_violation(&self.as_mat(x), p.mu_s.weights(), p.mu_t.weights()))
    }
}
