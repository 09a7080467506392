//! L1-ball constrained elastic net:
//!
//! ```text
//! min_x  L(y, Zx) + λ xᵀx   s.t. ‖x‖₁ ≤ τ
//! ```
//!
//! Splitting `f = L` and `g = λ xᵀx` turns the partial oracle into a
//! Euclidean projection of `-∇f / (2λ)` onto the ball, so every iteration
//! is a convex combination of the current point and a projected, scaled
//! negative gradient.

mod baselines;
mod data;
mod projection;

pub use baselines::{pg_solve, spg_solve, SPG_MEMORY, SPG_STEP_MAX, SPG_STEP_MIN};
pub use data::{load_csv_dataset, make_toy_classification, save_csv_dataset, DataError, Dataset, Split};
pub use projection::{l1_lmo, project_l1};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gcg::{OracleError, SplitObjective};
use crate::numerics::{self, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// `½‖y - Zx‖²`
    Squared,
    /// `Σ log(1 + exp(-yᵢ zᵢᵀx))`
    Logistic,
    /// `Σ max(0, 1 - yᵢ zᵢᵀx)²`
    SquaredHinge,
}

impl Loss {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Squared => "squared",
            Self::Logistic => "logistic",
            Self::SquaredHinge => "squared_hinge",
        }
    }
}

impl std::str::FromStr for Loss {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared" => Ok(Self::Squared),
            "logistic" => Ok(Self::Logistic),
            "squared_hinge" => Ok(Self::SquaredHinge),
            other => Err(format!(
                "unknown loss `{other}` (expected squared, logistic or squared_hinge)"
            )),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ElasticNetError {
    #[error("design matrix has {rows} rows but {targets} targets were given")]
    Dimension { rows: usize, targets: usize },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{loss} loss needs labels in {{-1, +1}}, found {value} at row {row}")]
    Label { loss: &'static str, row: usize, value: f64 },
}

#[derive(Debug, Clone)]
pub struct ElasticNetProblem {
    z: Mat,
    y: Vec<f64>,
    loss: Loss,
    lambda: f64,
    tau: f64,
}

impl ElasticNetProblem {
    pub fn new(z: Mat, y: Vec<f64>, loss: Loss, lambda: f64, tau: f64) -> Result<Self, ElasticNetError> {
        if z.rows() != y.len() {
            return Err(ElasticNetError::Dimension {
                rows: z.rows(),
                targets: y.len(),
            });
        }
        if !(lambda > 0.0) {
            return Err(ElasticNetError::NonPositive {
                name: "lambda",
                value: lambda,
            });
        }
        if !(tau > 0.0) {
            return Err(ElasticNetError::NonPositive {
                name: "tau",
                value: tau,
            });
        }
        if loss != Loss::Squared {
            if let Some((row, &value)) = y.iter().enumerate().find(|(_, &v)| v != 1.0 && v != -1.0) {
                return Err(ElasticNetError::Label {
                    loss: loss.as_str(),
                    row,
                    value,
                });
            }
        }
        Ok(Self {
            z,
            y,
            loss,
            lambda,
            tau,
        })
    }

    /// Problem over the training rows of `data`.
    pub fn from_training(data: &Dataset, loss: Loss, lambda: f64, tau: f64) -> Result<Self, ElasticNetError> {
        let (z, y) = data.train();
        Self::new(z, y, loss, lambda, tau)
    }

    pub fn z(&self) -> &Mat {
        &self.z
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_features(&self) -> usize {
        self.z.cols()
    }

    pub fn loss_eval(&self, x: &[f64]) -> f64 {
        let t = self.z.matvec(x);
        match self.loss {
            Loss::Squared => 0.5 * t.iter().zip(&self.y).fold(0.0, |acc, (t, y)| acc + (y - t) * (y - t)),
            Loss::Logistic => t.iter().zip(&self.y).fold(0.0, |acc, (t, y)| acc + softplus(-y * t)),
            Loss::SquaredHinge => t.iter().zip(&self.y).fold(0.0, |acc, (t, y)| {
                let m = (1.0 - y * t).max(0.0);
                acc + m * m
            }),
        }
    }

    pub fn loss_grad(&self, x: &[f64]) -> Vec<f64> {
        let t = self.z.matvec(x);
        let w: Vec<f64> = match self.loss {
            Loss::Squared => t.iter().zip(&self.y).map(|(t, y)| t - y).collect(),
            Loss::Logistic => t.iter().zip(&self.y).map(|(t, y)| -y * sigmoid(-y * t)).collect(),
            Loss::SquaredHinge => t
                .iter()
                .zip(&self.y)
                .map(|(t, y)| -2.0 * y * (1.0 - y * t).max(0.0))
                .collect(),
        };
        self.z.matvec_t(&w)
    }

    /// `∇F(x) = ∇L + 2λx`.
    pub fn full_grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.loss_grad(x);
        numerics::axpy(2.0 * self.lambda, x, &mut g);
        g
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.loss_eval(x) + self.lambda * numerics::norm2_sq(x)
    }

    /// Minimizer of `⟨∇f, s⟩ + λ sᵀs` over the ball: the projection of
    /// `-∇f / (2λ)`.
    pub fn en_oracle(&self, grad_f: &[f64]) -> Vec<f64> {
        let target: Vec<f64> = grad_f.iter().map(|g| -g / (2.0 * self.lambda)).collect();
        project_l1(&target, self.tau)
    }

    /// `‖Π(x - ∇F(x)) - x‖∞`, the projected-gradient optimality residual.
    pub fn fixed_point_residual(&self, x: &[f64]) -> f64 {
        self.fixed_point_residual_with(x, &self.full_grad(x))
    }

    pub(crate) fn fixed_point_residual_with(&self, x: &[f64], grad_full: &[f64]) -> f64 {
        let p = project_l1(&numerics::sub(x, grad_full), self.tau);
        numerics::norm_inf(&numerics::sub(&p, x))
    }

    /// Fraction of rows whose sign of `zᵢᵀx` matches the label.
    pub fn accuracy(z: &Mat, y: &[f64], x: &[f64]) -> f64 {
        let t = z.matvec(x);
        let hits = t.iter().zip(y).filter(|(t, y)| **t * **y > 0.0).count();
        hits as f64 / y.len().max(1) as f64
    }
}

#[inline]
fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

impl SplitObjective for ElasticNetProblem {
    fn dim(&self) -> usize {
        self.z.cols()
    }

    fn f(&self, x: &[f64]) -> f64 {
        self.loss_eval(x)
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(self.loss_grad(x))
    }

    fn g(&self, x: &[f64]) -> f64 {
        self.lambda * numerics::norm2_sq(x)
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(x.iter().map(|v| 2.0 * self.lambda * v).collect())
    }

    fn partial_oracle(&self, _x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(self.en_oracle(grad_f))
    }

    /// Least squares is quadratic along any line, so its line search has a
    /// closed form.
    fn exact_step(&self, x: &[f64], dx: &[f64]) -> Option<f64> {
        if self.loss != Loss::Squared {
            return None;
        }
        let zx = self.z.matvec(x);
        let zd = self.z.matvec(dx);
        let resid: Vec<f64> = self.y.iter().zip(&zx).map(|(y, t)| y - t).collect();
        let num = numerics::dot(&resid, &zd) - 2.0 * self.lambda * numerics::dot(x, dx);
        let den = numerics::norm2_sq(&zd) + 2.0 * self.lambda * numerics::norm2_sq(dx);
        if den <= 0.0 {
            return None;
        }
        Some((num / den).clamp(0.0, 1.0))
    }

    fn residual(&self, x: &[f64]) -> Option<f64> {
        Some(self.fixed_point_residual(x))
    }
}
