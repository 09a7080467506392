use super::{Histogram, OtError};
use crate::numerics::{Mat, Rng};

/// Factor applied to positions inside the Laplacian term of
/// [`TransportProblem::from_clusters`](super::TransportProblem::from_clusters).
pub const DEFAULT_POSITION_SCALE: f64 = 0.1;

/// Source and target point clouds with their histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterData {
    pub xs: Mat,
    pub xt: Mat,
    pub mu_s: Histogram,
    pub mu_t: Histogram,
}

/// Noisy 2-D clusters. Source centers sit on the unit circle; the target
/// blobs are the same centers rotated by π/4 and shifted by (0.5, 0.3).
/// Points are assigned to clusters round-robin.
pub fn make_cluster_data(
    ns: usize,
    nt: usize,
    n_clusters: usize,
    noise: f64,
    seed: u64,
) -> Result<ClusterData, OtError> {
    if n_clusters < 1 || ns < n_clusters || nt < n_clusters {
        return Err(OtError::Parameter(format!(
            "need ns, nt >= n_clusters >= 1, got ns={ns}, nt={nt}, n_clusters={n_clusters}"
        )));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(OtError::Parameter(format!(
            "noise must be finite and nonnegative, got {noise}"
        )));
    }
    let centers: Vec<[f64; 2]> = (0..n_clusters)
        .map(|c| {
            let t = 2.0 * std::f64::consts::PI * c as f64 / n_clusters as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let (sin, cos) = std::f64::consts::FRAC_PI_4.sin_cos();
    let moved: Vec<[f64; 2]> = centers
        .iter()
        .map(|[x, y]| [cos * x - sin * y + 0.5, sin * x + cos * y + 0.3])
        .collect();

    let mut rng = Rng::new(seed);
    let mut cloud = |n: usize, centers: &[[f64; 2]]| {
        Mat::from_fn(n, 2, |i, j| {
            let c = centers[i % centers.len()][j];
            if noise == 0.0 {
                c
            } else {
                c + noise * rng.normal()
            }
        })
    };
    let xs = cloud(ns, &centers);
    let xt = cloud(nt, &moved);
    Ok(ClusterData {
        xs,
        xt,
        mu_s: Histogram::uniform(ns),
        mu_t: Histogram::uniform(nt),
    })
}
