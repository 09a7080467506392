use std::cmp::Ordering;

/// Euclidean projection onto `{x : ‖x‖₁ ≤ tau}`.
///
/// Points inside the ball come back unchanged. Otherwise the result is the
/// soft-threshold of `v` at the unique `θ > 0` with
/// `Σ max(|vᵢ| - θ, 0) = tau`, found by sorting magnitudes.
pub fn project_l1(v: &[f64], tau: f64) -> Vec<f64> {
    assert!(tau > 0.0, "L1 radius must be positive, got {tau}");
    let norm1: f64 = v.iter().map(|x| x.abs()).sum();
    if norm1 <= tau {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - tau) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .map(|x| if x == 0.0 { 0.0 } else { x })
        .collect()
}

/// Vertex of the L1 ball minimizing `⟨grad, s⟩`: `-tau · sign(gᵢ) · eᵢ` at
/// the largest-magnitude coordinate (lowest index on ties). A zero gradient
/// returns `+tau · e₀`.
pub fn l1_lmo(grad: &[f64], tau: f64) -> Vec<f64> {
    let mut s = vec![0.0; grad.len()];
    if grad.is_empty() {
        return s;
    }
    let (mut best, mut best_abs) = (0usize, grad[0].abs());
    for (i, g) in grad.iter().enumerate().skip(1) {
        if g.abs() > best_abs {
            best = i;
            best_abs = g.abs();
        }
    }
    s[best] = if grad[best] > 0.0 { -tau } else { tau };
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, norm1, norm2_sq, norm_inf, sub, Rng};
    use proptest::prelude::*;

    /// Threshold by bisection on `θ ↦ Σ max(|vᵢ| - θ, 0) - τ`.
    fn bisection_projection(v: &[f64], tau: f64) -> Vec<f64> {
        if norm1(v) <= tau {
            return v.to_vec();
        }
        let (mut lo, mut hi) = (0.0, norm_inf(v));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let mass: f64 = v.iter().map(|x| (x.abs() - mid).max(0.0)).sum();
            if mass > tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        v.iter().map(|&x| x.signum() * (x.abs() - theta).max(0.0)).collect()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_l1(&[0.2, -0.1], 1.0), vec![0.2, -0.1]);
        assert_eq!(project_l1(&[3.0, 0.0], 1.0), vec![1.0, 0.0]);
        assert_eq!(project_l1(&[1.0, 1.0], 1.0), vec![0.5, 0.5]);
        assert_eq!(project_l1(&[-1.0, 1.0], 1.0), vec![-0.5, 0.5]);
    }

    #[test]
    fn projection_matches_bisection() {
        let mut rng = Rng::new(42);
        for _ in 0..200 {
            let n = 1 + rng.index(50);
            let v: Vec<f64> = rng.normal_vec(n).iter().map(|x| x * 3.0).collect();
            let tau = rng.uniform_in(0.01, 5.0);
            let p = project_l1(&v, tau);
            let q = bisection_projection(&v, tau);
            assert!(norm_inf(&sub(&p, &q)) <= 1e-10);
        }
    }

    #[test]
    fn lmo_examples() {
        assert_eq!(l1_lmo(&[1.0, -3.0], 2.0), vec![0.0, 2.0]);
        assert_eq!(l1_lmo(&[5.0, 0.0, 0.0], 1.0), vec![-1.0, 0.0, 0.0]);
        assert_eq!(l1_lmo(&[0.0, 0.0], 1.5), vec![1.5, 0.0]);
        // ties pick the lowest index
        assert_eq!(l1_lmo(&[-2.0, 2.0], 1.0), vec![1.0, 0.0]);
    }

    #[test]
    fn lmo_vertex_enumeration() {
        let mut rng = Rng::new(1);
        for _ in 0..100 {
            let n = 1 + rng.index(6);
            let g = rng.normal_vec(n);
            let tau = rng.uniform_in(0.1, 3.0);
            let s = l1_lmo(&g, tau);
            let best = (0..n)
                .flat_map(|i| [-tau, tau].map(|t| g[i] * t))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(dot(&g, &s), best);
        }
    }

    proptest! {
        #[test]
        fn projection_is_closest_feasible(
            v in prop::collection::vec(-10.0f64..10.0, 1..30),
            tau in 0.01f64..8.0,
            seed in any::<u64>(),
        ) {
            let p = project_l1(&v, tau);
            prop_assert!(norm1(&p) <= tau + 1e-12);
            let d = norm2_sq(&sub(&v, &p));
            let mut rng = Rng::new(seed);
            for _ in 0..100 {
                let w = project_l1(&rng.normal_vec(v.len()).iter().map(|x| x * 4.0).collect::<Vec<_>>(), tau);
                prop_assert!(d <= norm2_sq(&sub(&v, &w)) + 1e-12);
            }
        }

        #[test]
        fn lmo_attains_support_function(g in prop::collection::vec(-10.0f64..10.0, 1..30), tau in 0.01f64..8.0) {
            let s = l1_lmo(&g, tau);
            prop_assert!((dot(&g, &s) + tau * norm_inf(&g)).abs() <= 1e-12 * (1.0 + tau * norm_inf(&g)));
            prop_assert_eq!(s.iter().filter(|x| **x != 0.0).count(), 1);
        }
    }
}
