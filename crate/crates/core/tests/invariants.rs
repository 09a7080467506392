use gcgs_core::elasticnet::{project_l1, ElasticNetProblem, Loss};
use gcgs_core::numerics::{dot, norm1, Mat, Rng};
use gcgs_core::ot::{
    knn_laplacian, make_cluster_data, ot_split, sinkhorn_report, transport_lmo, Histogram, SinkhornParams,
    TransportPlan, TransportProblem, SINKHORN_FLOOR,
};
use gcgs_core::toy::BoxQuadratic;
use gcgs_core::{solve, solve_observed, SolverConfig, StepRule, Termination};
use proptest::prelude::*;

fn rule() -> impl Strategy<Value = StepRule> {
    prop_oneof![Just(StepRule::Exact), Just(StepRule::Armijo), Just(StepRule::Fixed)]
}

fn box_problem() -> impl Strategy<Value = BoxQuadratic> {
    (1usize..8)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.0..5.0f64, n),
                prop::collection::vec(-3.0..3.0f64, n),
                0.0..2.0f64,
                0.2..2.0f64,
            )
        })
        .prop_map(|(q, c, lambda, r)| BoxQuadratic::new(q, c, lambda, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_bounds_suboptimality(p in box_problem(), rule in rule(), seed in 0u64..1000) {
        let x0 = p.random_feasible(&mut Rng::new(seed));
        let cfg = SolverConfig::default().with_step(rule).with_max_iter(200);
        let fstar = p.optimal_value();
        let res = solve(&p, &x0, &cfg).unwrap();
        for rec in &res.trace {
            prop_assert!(rec.surrogate_gap >= 0.0);
            prop_assert!(rec.objective - fstar <= rec.surrogate_gap + 1e-10 * (1.0 + fstar.abs()));
        }
        prop_assert!(res.x_final.iter().all(|v| v.abs() <= p.radius() * (1.0 + 1e-12)));
    }

    #[test]
    fn line_search_rules_never_increase_objective(p in box_problem(), armijo in any::<bool>(), seed in 0u64..1000) {
        let x0 = p.random_feasible(&mut Rng::new(seed));
        let rule = if armijo { StepRule::Armijo } else { StepRule::Exact };
        let res = solve(&p, &x0, &SolverConfig::default().with_step(rule).with_max_iter(200)).unwrap();
        for w in res.trace.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective + 1e-12 * (1.0 + w[0].objective.abs()));
        }
        prop_assert!(res.trace.iter().all(|r| (0.0..=1.0).contains(&r.alpha)));
    }

    #[test]
    fn l1_projection_properties(v in prop::collection::vec(-10.0..10.0f64, 1..40), w in prop::collection::vec(-10.0..10.0f64, 40), tau in 0.1..20.0f64) {
        let w = &w[..v.len()];
        let p = project_l1(&v, tau);
        prop_assert!(norm1(&p) <= tau * (1.0 + 1e-12));
        let again = project_l1(&p, tau);
        for (a, b) in again.iter().zip(&p) {
            prop_assert!((a - b).abs() <= 1e-12 * tau);
        }
        if norm1(&v) <= tau {
            prop_assert_eq!(&p, &v);
        }
        // variational inequality: ⟨v - p, w' - p⟩ ≤ 0 for feasible w'
        let wf = project_l1(w, tau);
        let ip: f64 = v.iter().zip(&p).zip(&wf).map(|((v, p), w)| (v - p) * (w - p)).sum();
        prop_assert!(ip <= 1e-9 * (1.0 + tau * tau));
    }

    #[test]
    fn enet_iterates_stay_in_ball(seed in 0u64..500, logistic in any::<bool>(), tau in 0.5..5.0f64) {
        let mut rng = Rng::new(seed);
        let (m, n) = (10 + rng.index(20), 3 + rng.index(15));
        let z = Mat::from_fn(m, n, |_, _| rng.normal());
        let y: Vec<f64> = (0..m).map(|_| rng.sign()).collect();
        let loss = if logistic { Loss::Logistic } else { Loss::Squared };
        let p = ElasticNetProblem::new(z, y, loss, 0.3, tau).unwrap();
        let x0 = vec![0.0; n];
        let mut ok = true;
        let cfg = SolverConfig::default().with_gap_tol(0.0).with_residual_tol(1e-8).with_max_iter(3000);
        let res = solve_observed(&p, &x0, &cfg, |v| ok &= norm1(v.x) <= tau * (1.0 + 1e-10)).unwrap();
        prop_assert!(ok);
        prop_assert!(res.termination.converged(), "{:?}", res.termination);
        prop_assert!(p.fixed_point_residual(&res.x_final) <= 1e-8 || res.termination == Termination::Stalled);
    }
}

fn small_problem(n: usize, k: usize, seed: u64) -> TransportProblem {
    let data = make_cluster_data(n, n, 3, 0.1, seed).unwrap();
    TransportProblem::from_clusters(&data, 1.7e-2, 1e3, k, 0.1).unwrap()
}

#[test]
fn transport_iterates_are_feasible_and_positive() {
    for seed in 0..3 {
        let problem = small_problem(20, 5, seed);
        let split = ot_split(&problem).unwrap();
        let x0 = problem
            .initial_plan(SinkhornParams::default())
            .unwrap()
            .into_mat()
            .into_vec();
        let cfg = SolverConfig::default().with_gap_tol(1e-6).with_max_iter(300);
        let (a, b) = (problem.mu_s.weights(), problem.mu_t.weights());
        let mut worst = 0.0f64;
        let mut smallest = f64::INFINITY;
        solve_observed(&split, &x0, &cfg, |v| {
            let gamma = Mat::from_vec(a.len(), b.len(), v.x.to_vec()).unwrap();
            worst = worst.max(gamma_violation(&gamma, a, b));
            smallest = v.x.iter().copied().fold(smallest, f64::min);
        })
        .unwrap();
        assert!(worst <= 1e-8, "seed {seed}: violation {worst}");
        assert!(smallest >= SINKHORN_FLOOR, "seed {seed}: entry {smallest}");
    }
}

fn gamma_violation(gamma: &Mat, a: &[f64], b: &[f64]) -> f64 {
    let rows = gamma
        .row_sums()
        .iter()
        .zip(a)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    gamma
        .col_sums()
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(rows, f64::max)
}

#[test]
fn transport_lmo_beats_feasible_plans() {
    let mut rng = Rng::new(3);
    for _ in 0..20 {
        let (r, c) = (2 + rng.index(12), 2 + rng.index(12));
        let cost = Mat::from_fn(r, c, |_, _| rng.normal());
        let a = Histogram::random(&mut rng, r);
        let b = Histogram::random(&mut rng, c);
        let best = transport_lmo(&cost, &a, &b).unwrap();
        let value = best.gamma().frobenius_dot(&cost);
        assert!(best.marginal_violation(a.weights(), b.weights()) <= 1e-12);
        let mut candidates = vec![TransportPlan::product(&a, &b)];
        for _ in 0..5 {
            let other = Mat::from_fn(r, c, |_, _| rng.uniform_in(0.0, 3.0));
            candidates.push(
                sinkhorn_report(&other, a.weights(), b.weights(), 0.5, SinkhornParams::default())
                    .unwrap()
                    .plan,
            );
        }
        for plan in candidates {
            assert!(value <= plan.gamma().frobenius_dot(&cost) + 1e-12);
        }
    }
}

#[test]
fn knn_laplacian_is_a_graph_laplacian() {
    let mut rng = Rng::new(9);
    let points = Mat::from_fn(30, 2, |_, _| rng.normal());
    let lap = knn_laplacian(&points, 4).unwrap();
    assert!(lap.is_symmetric(0.0));
    for i in 0..30 {
        assert!(lap.row(i).iter().sum::<f64>().abs() <= 1e-12);
        assert!(lap.row(i).iter().enumerate().all(|(j, &v)| i == j || v <= 0.0));
    }
    for _ in 0..10 {
        let v = rng.normal_vec(30);
        assert!(dot(&v, &lap.matvec(&v)) >= -1e-12);
    }
}

#[test]
fn splitting_converged_value_is_no_worse_than_classic() {
    for seed in 0..2 {
        let problem = small_problem(30, 10, seed);
        let split = ot_split(&problem).unwrap();
        let x0 = problem
            .initial_plan(SinkhornParams::default())
            .unwrap()
            .into_mat()
            .into_vec();
        let start = problem.objective(&Mat::from_vec(30, 30, x0.clone()).unwrap());
        let cfg = SolverConfig {
            gap_relative: true,
            ..SolverConfig::default().with_gap_tol(1e-6)
        };
        let cgs = solve(&split, &x0, &cfg).unwrap();
        let cg = solve(
            &split.classic(),
            &x0,
            &SolverConfig::default().with_gap_tol(0.0).with_max_iter(300),
        )
        .unwrap();
        assert!(cgs.termination.converged(), "{:?}", cgs.termination);
        let last = |r: &gcgs_core::SolveResult| r.trace.last().unwrap().objective;
        assert!(last(&cg) < start);
        assert!(
            last(&cgs) <= last(&cg) + 1e-9,
            "seed {seed}: {} vs {}",
            last(&cgs),
            last(&cg)
        );
    }
}
