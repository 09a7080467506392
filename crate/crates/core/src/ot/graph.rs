use super::OtError;
use crate::numerics::Mat;

/// Laplacian `D - W` of the symmetrized k-nearest-neighbor graph of the rows
/// of `points`.
///
/// `W` is the binary kNN adjacency (squared Euclidean distance, ties broken
/// by lower index) symmetrized with `max(W, Wᵀ)`.
pub fn knn_laplacian(points: &Mat, k: usize) -> Result<Mat, OtError> {
    let n = points.rows();
    if k < 1 || k >= n {
        return Err(OtError::Neighbors { k, points: n });
    }
    let mut w = Mat::zeros(n, n);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        let pi = points.row(i);
        for j in (0..n).filter(|&j| j != i) {
            let d = pi
                .iter()
                .zip(points.row(j))
                .fold(0.0, |acc, (a, b)| acc + (a - b) * (a - b));
            order.push((d, j));
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &order[..k] {
            w[(i, j)] = 1.0;
            w[(j, i)] = 1.0;
        }
    }
    let mut lap = w.map(|v| -v);
    for i in 0..n {
        lap[(i, i)] = w.row(i).iter().sum();
    }
    Ok(lap)
}

/// `min_i (Lᵢᵢ - Σ_{j≠i} |Lᵢⱼ|)`, a lower bound on the smallest eigenvalue
/// of a symmetric matrix.
pub fn gershgorin_lower_bound(m: &Mat) -> f64 {
    (0..m.rows())
        .map(|i| {
            let off: f64 = m
                .row(i)
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.abs())
                .sum();
            m[(i, i)] - off
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian_draws, Rng};

    #[test]
    fn collinear_path_graph() {
        let x = Mat::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let l = knn_laplacian(&x, 1).unwrap();
        let expected = Mat::from_rows(&[vec![1.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 1.0]]).unwrap();
        assert_eq!(l, expected);
    }

    #[test]
    fn all_neighbors_gives_complete_graph() {
        let mut rng = Rng::new(1);
        let x = gaussian_draws(&mut rng, 6, 2).unwrap();
        let l = knn_laplacian(&x, 5).unwrap();
        let expected = Mat::from_fn(6, 6, |i, j| if i == j { 5.0 } else { -1.0 });
        assert_eq!(l, expected);
    }

    #[test]
    fn laplacian_invariants() {
        let mut rng = Rng::new(2);
        for k in [1, 3, 10] {
            let x = gaussian_draws(&mut rng, 40, 2).unwrap();
            let l = knn_laplacian(&x, k).unwrap();
            assert!(l.is_symmetric(0.0));
            assert!(l.row_sums().iter().all(|s| *s == 0.0));
            assert!(gershgorin_lower_bound(&l) >= -1e-10);
        }
    }

    #[test]
    fn duplicate_points_break_ties_by_index() {
        let x = Mat::from_rows(&[vec![0.0], vec![0.0], vec![0.0], vec![5.0]]).unwrap();
        let l = knn_laplacian(&x, 1).unwrap();
        // 0 -> 1, 1 -> 0, 2 -> 0, 3 -> 0 (all at distance 25, lowest index wins)
        assert_eq!(l[(0, 0)], 3.0);
        assert_eq!(l[(0, 1)], -1.0);
        assert_eq!(l[(2, 0)], -1.0);
        assert_eq!(l[(3, 0)], -1.0);
        assert_eq!(l[(1, 2)], 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        let x = Mat::zeros(3, 2);
        assert!(knn_laplacian(&x, 0).is_err());
        assert!(knn_laplacian(&x, 3).is_err());
    }
}
