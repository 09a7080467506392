//! Small dense linear-algebra kernel, seeded randomness, a bracketed 1-D
//! minimizer and central finite differences.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; matrices are row-major [`Mat`].
//! All reductions run left to right so results are reproducible bit for bit.

use std::ops::{Index, IndexMut};

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("non-finite function value {value} at alpha = {alpha}")]
    NonFiniteLineValue { alpha: f64, value: f64 },
    #[error("non-finite function value {value} while differencing coordinate {coord}")]
    NonFiniteDifference { coord: usize, value: f64 },
    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting bad lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::Dimension {
                expected: format!("{rows}x{cols} = {} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFiniteEntry {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(NumericsError::Dimension {
                    expected: format!("{c} columns"),
                    got: format!("{} columns in row {i}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Mat) -> Result<Mat, NumericsError> {
        if self.cols != other.rows {
            return Err(NumericsError::Dimension {
                expected: format!("{} rows on the right operand", self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ * v`.
    pub fn matvec_t(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "matvec_t dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, self.row(i), &mut out);
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (o, &v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        out
    }

    /// Frobenius inner product `⟨self, other⟩`.
    pub fn frobenius_dot(&self, other: &Mat) -> f64 {
        assert_eq!(self.shape(), other.shape(), "frobenius_dot shape mismatch");
        dot(&self.data, &other.data)
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    pub fn add_scaled(&mut self, a: f64, other: &Mat) {
        assert_eq!(self.shape(), other.shape(), "add_scaled shape mismatch");
        axpy(a, &other.data, &mut self.data);
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky
/// factorization. Returns `None` if a pivot is not positive.
pub fn cholesky_solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return None;
    }
    let mut l = a.clone();
    for j in 0..n {
        let mut d = l[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[(i, k)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= l[(k, i)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    Some(x)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |s, v| s + v.abs())
}

pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm2(a: &[f64]) -> f64 {
    norm2_sq(a).sqrt()
}

/// Seeded ChaCha8 stream; the seed alone fixes every draw.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniform draw from `{-1, +1}`.
    pub fn sign(&mut self) -> f64 {
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}

/// `r x c` matrix of standard-normal draws, filled row by row.
pub fn gaussian_draws(rng: &mut Rng, r: usize, c: usize) -> Result<Mat, NumericsError> {
    if r == 0 || c == 0 {
        return Err(NumericsError::InvalidArgument(format!(
            "gaussian_draws needs positive dimensions, got {r}x{c}"
        )));
    }
    Ok(Mat::from_fn(r, c, |_, _| rng.normal()))
}

pub const GOLDEN_TOL: f64 = 1e-10;
pub const GOLDEN_MAX_EVALS: usize = 200;

/// Golden-section search for a minimizer of `phi` on `[0, 1]`.
///
/// The endpoints are evaluated too and win whenever they are no worse than
/// the interior estimate, so boundary minima come back exactly.
pub fn golden_section_min<F>(mut phi: F, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "golden_section_min tolerance must be positive, got {tol}"
        )));
    }
    let mut evals = 0usize;
    let mut eval = |a: f64| -> Result<f64, NumericsError> {
        evals += 1;
        let v = phi(a);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteLineValue { alpha: a, value: v })
        }
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f0 = eval(0.0)?;
    let f1 = eval(1.0)?;

    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    // 4 evaluations so far, one per shrink step from here on.
    let mut used = 4usize;
    while b - a > tol && used < GOLDEN_MAX_EVALS - 1 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
        used += 1;
    }
    let (mut best_a, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };
    let mid = 0.5 * (a + b);
    let fm = eval(mid)?;
    if fm < best_f {
        best_a = mid;
        best_f = fm;
    }

    if f0 <= best_f {
        return Ok(0.0);
    }
    if f1 <= best_f {
        return Ok(1.0);
    }
    Ok(best_a)
}

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn finite_diff_grad<F>(mut f: F, x: &[f64], h: f64) -> Result<Vec<f64>, NumericsError>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "finite difference step must be positive, got {h}"
        )));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        for v in [fp, fm] {
            if !v.is_finite() {
                return Err(NumericsError::NonFiniteDifference { coord: i, value: v });
            }
        }
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

/// Largest absolute deviation between two gradients, relative to
/// `max(1, ‖reference‖∞)`.
pub fn relative_grad_error(analytic: &[f64], reference: &[f64]) -> f64 {
    let scale = norm_inf(reference).max(1.0);
    norm_inf(&sub(analytic, reference)) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_interior_minimum() {
        let a = golden_section_min(|a| (a - 0.3) * (a - 0.3), 1e-10).unwrap();
        assert_abs_diff_eq!(a, 0.3, epsilon = 1e-8);
    }

    #[test]
    fn golden_boundary_minima() {
        assert_eq!(golden_section_min(|a| a, 1e-10).unwrap(), 0.0);
        assert_eq!(golden_section_min(|a| (a - 2.0) * (a - 2.0), 1e-10).unwrap(), 1.0);
    }

    #[test]
    fn golden_rejects_non_finite() {
        let err = golden_section_min(|a| if a > 0.5 { f64::NAN } else { a }, 1e-10).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteLineValue { alpha, .. } if alpha > 0.5));
    }

    #[test]
    fn golden_respects_eval_cap() {
        let mut n = 0;
        golden_section_min(
            |a| {
                n += 1;
                (a - 0.7).abs()
            },
            1e-300,
        )
        .unwrap();
        assert!(n <= GOLDEN_MAX_EVALS);
    }

    #[test]
    fn golden_convex_grid_property() {
        // phi(alpha) <= min over a fine grid + slack for a few convex shapes
        let shapes: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|a: f64| (a - 0.123).powi(2)),
            Box::new(|a: f64| (3.0 * a - 2.0).abs() + 0.1 * a),
            Box::new(|a: f64| (a + 0.01).ln().mul_add(-1.0, 4.0 * a)),
            Box::new(|a: f64| (5.0 * a).exp() - 6.0 * a),
        ];
        for phi in shapes {
            let a = golden_section_min(&phi, 1e-10).unwrap();
            let grid_min = (0..=10_000)
                .map(|i| phi(i as f64 / 10_000.0))
                .fold(f64::INFINITY, f64::min);
            assert!(phi(a) <= grid_min + 1e-9, "phi(a) = {}, grid {}", phi(a), grid_min);
        }
    }

    #[test]
    fn finite_difference_examples() {
        let g = finite_diff_grad(|x| x[0] * x[0], &[3.0], 1e-6).unwrap();
        assert_abs_diff_eq!(g[0], 6.0, epsilon = 1e-6);
        let g = finite_diff_grad(|_| 4.2, &[1.0, -2.0, 0.5], 1e-6).unwrap();
        assert_eq!(g, vec![0.0; 3]);
        let g = finite_diff_grad(|x| x[0] * x[1], &[2.0, 5.0], 1e-6).unwrap();
        assert_abs_diff_eq!(g[0], 5.0, epsilon = 1e-6);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn finite_difference_rejects_non_finite() {
        let err = finite_diff_grad(|x| (x[0] - 1e-7).ln(), &[0.0], 1e-6).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteDifference { coord: 0, .. }));
    }

    #[test]
    fn gaussian_draws_are_reproducible() {
        let a = gaussian_draws(&mut Rng::new(7), 2, 2).unwrap();
        let b = gaussian_draws(&mut Rng::new(7), 2, 2).unwrap();
        assert_eq!(a, b);
        let c = gaussian_draws(&mut Rng::new(8), 2, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_draws_moments() {
        let m = gaussian_draws(&mut Rng::new(11), 1, 10_000).unwrap();
        let n = m.as_slice().len() as f64;
        let mean = m.as_slice().iter().sum::<f64>() / n;
        let var = m.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "var {var}");
    }

    #[test]
    fn gaussian_draws_rejects_empty() {
        assert!(gaussian_draws(&mut Rng::new(1), 0, 3).is_err());
    }

    #[test]
    fn mat_construction_checks() {
        assert!(Mat::from_vec(2, 2, vec![1.0, 2.0, 3.0]).is_err());
        let err = Mat::from_vec(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).unwrap_err();
        assert!(matches!(err, NumericsError::NonFiniteEntry { row: 1, col: 0, .. }));
    }

    #[test]
    fn mat_products() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let b = Mat::from_rows(&[vec![1.0, 0.0, -1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        let ab = a.matmul(&b).unwrap();
        assert_eq!(
            ab,
            Mat::from_rows(&[vec![5.0, 2.0, -1.0], vec![11.0, 4.0, -3.0], vec![17.0, 6.0, -5.0]]).unwrap()
        );
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.matvec_t(&[1.0, 0.0, 1.0]), vec![6.0, 8.0]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.row_sums(), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.col_sums(), vec![9.0, 12.0]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Mat::from_rows(&[vec![4.0, 2.0, 0.6], vec![2.0, 5.0, 1.0], vec![0.6, 1.0, 3.0]]).unwrap();
        let x = [1.0, -2.0, 0.5];
        let b = a.matvec(&x);
        let got = cholesky_solve(&a, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-14);
        }
        let indefinite = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(cholesky_solve(&indefinite, &[1.0, 1.0]).is_none());
    }
}
