//! Small problems with closed-form optima and curvature constants, used to
//! check the solver against known answers.

use crate::elasticnet::l1_lmo;
use crate::gcg::{cg_adapter, OracleError, SplitObjective};
use crate::numerics::{self, Rng};

/// `F(x) = Σ ½ qᵢ (xᵢ - cᵢ)² + λ‖x‖²` over the box `[-r, r]ⁿ`, split as
/// `f` = the weighted quadratic and `g = λ‖x‖²`.
#[derive(Debug, Clone)]
pub struct BoxQuadratic {
    q: Vec<f64>,
    c: Vec<f64>,
    lambda: f64,
    radius: f64,
}

impl BoxQuadratic {
    pub fn new(q: Vec<f64>, c: Vec<f64>, lambda: f64, radius: f64) -> Self {
        assert_eq!(q.len(), c.len());
        assert!(q.iter().all(|&v| v >= 0.0) && lambda >= 0.0 && radius > 0.0);
        Self { q, c, lambda, radius }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn minimizer(&self) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.c)
            .map(|(&q, &c)| {
                let h = q + 2.0 * self.lambda;
                let v = if h > 0.0 { q * c / h } else { 0.0 };
                v.clamp(-self.radius, self.radius)
            })
            .collect()
    }

    pub fn optimal_value(&self) -> f64 {
        self.objective(&self.minimizer())
    }

    /// `sup (s - x)ᵀ H (s - x)` over the box, attained at opposite corners.
    pub fn curvature_constant(&self) -> f64 {
        let diam = 2.0 * self.radius;
        self.q.iter().map(|q| (q + 2.0 * self.lambda) * diam * diam).sum()
    }

    pub fn random_feasible(&self, rng: &mut Rng) -> Vec<f64> {
        (0..self.q.len())
            .map(|_| rng.uniform_in(-self.radius, self.radius))
            .collect()
    }
}

impl SplitObjective for BoxQuadratic {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn f(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.q)
            .zip(&self.c)
            .fold(0.0, |acc, ((x, q), c)| acc + 0.5 * q * (x - c) * (x - c))
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(x.iter()
            .zip(&self.q)
            .zip(&self.c)
            .map(|((x, q), c)| q * (x - c))
            .collect())
    }

    fn g(&self, x: &[f64]) -> f64 {
        self.lambda * numerics::norm2_sq(x)
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(x.iter().map(|v| 2.0 * self.lambda * v).collect())
    }

    fn partial_oracle(&self, x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        let r = self.radius;
        Ok(grad_f
            .iter()
            .zip(x)
            .map(|(&g, &xi)| {
                if self.lambda > 0.0 {
                    (-g / (2.0 * self.lambda)).clamp(-r, r)
                } else if g > 0.0 {
                    -r
                } else if g < 0.0 {
                    r
                } else {
                    xi
                }
            })
            .collect())
    }
}

/// `f(x) = ‖x - c‖²`, `g = 0` over the L1 ball of radius `tau`; the partial
/// oracle is the L1-ball vertex oracle.
#[derive(Debug, Clone)]
pub struct L1Quadratic {
    c: Vec<f64>,
    tau: f64,
}

impl L1Quadratic {
    pub fn new(c: Vec<f64>, tau: f64) -> Self {
        Self { c, tau }
    }

    /// The same problem seen through [`cg_adapter`].
    pub fn classic(&self) -> impl SplitObjective + '_ {
        let tau = self.tau;
        cg_adapter(self, move |g: &[f64]| -> Result<Vec<f64>, OracleError> {
            Ok(l1_lmo(g, tau))
        })
    }

    pub fn random_feasible(&self, rng: &mut Rng) -> Vec<f64> {
        let v = rng.normal_vec(self.c.len());
        let n1 = numerics::norm1(&v).max(f64::MIN_POSITIVE);
        let scale = self.tau * rng.uniform() / n1;
        v.iter().map(|x| x * scale).collect()
    }
}

impl SplitObjective for L1Quadratic {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn f(&self, x: &[f64]) -> f64 {
        numerics::norm2_sq(&numerics::sub(x, &self.c))
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(x.iter().zip(&self.c).map(|(x, c)| 2.0 * (x - c)).collect())
    }

    fn g(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(vec![0.0; x.len()])
    }

    fn partial_oracle(&self, _x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(l1_lmo(grad_f, self.tau))
    }
}

/// `F(x) = ⟨c, x⟩` over `[-1, 1]ⁿ`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub c: Vec<f64>,
}

impl SplitObjective for Linear {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn f(&self, x: &[f64]) -> f64 {
        numerics::dot(&self.c, x)
    }

    fn grad_f(&self, _x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(self.c.clone())
    }

    fn g(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(vec![0.0; x.len()])
    }

    fn partial_oracle(&self, _x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(grad_f.iter().map(|&g| if g > 0.0 { -1.0 } else { 1.0 }).collect())
    }
}

/// Adds a constant to `g` of the wrapped problem.
pub struct Shifted<'a, O: ?Sized> {
    pub inner: &'a O,
    pub shift: f64,
}

impl<O: SplitObjective + ?Sized> SplitObjective for Shifted<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn f(&self, x: &[f64]) -> f64 {
        self.inner.f(x)
    }

    fn grad_f(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.inner.grad_f(x)
    }

    fn g(&self, x: &[f64]) -> f64 {
        self.inner.g(x) + self.shift
    }

    fn grad_g(&self, x: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.inner.grad_g(x)
    }

    fn partial_oracle(&self, x: &[f64], grad_f: &[f64]) -> Result<Vec<f64>, OracleError> {
        self.inner.partial_oracle(x, grad_f)
    }
}
