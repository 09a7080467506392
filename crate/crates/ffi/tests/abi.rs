use std::ffi::CStr;
use std::ptr;

use gcgs_ffi::*;

fn last_error() -> String {
    let p = gcgs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn toy_design(rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let z: Vec<f64> = (0..rows * cols)
        .map(|i| ((i * 7919) % 23) as f64 / 23.0 - 0.5)
        .collect();
    let y: Vec<f64> = (0..rows)
        .map(|i| {
            if z[i * cols] + 0.3 * z[i * cols + 1] > 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    (z, y)
}

#[test]
fn enet_round_trip() {
    let (rows, cols) = (40, 6);
    let (z, y) = toy_design(rows, cols);
    let mut problem = ptr::null_mut();
    let st = unsafe {
        gcgs_enet_problem_new(
            z.as_ptr(),
            rows,
            cols,
            y.as_ptr(),
            GcgsLoss::Logistic,
            0.1,
            2.0,
            &mut problem,
        )
    };
    assert_eq!(st, GcgsStatus::Ok);
    assert_eq!(unsafe { gcgs_enet_problem_dim(problem) }, cols);

    let mut opts = gcgs_solver_options_default();
    opts.gap_tol = 0.0;
    opts.residual_tol = 1e-9;
    opts.max_iter = 5000;
    let mut objectives = Vec::new();
    for solver in [GcgsSolver::Cgs, GcgsSolver::Spg, GcgsSolver::Pg] {
        opts.solver = solver;
        let mut result = ptr::null_mut();
        assert_eq!(
            unsafe { gcgs_enet_solve(problem, ptr::null(), &opts, &mut result) },
            GcgsStatus::Ok
        );
        let mut term = GcgsTermination::MaxIter;
        assert_eq!(unsafe { gcgs_result_termination(result, &mut term) }, GcgsStatus::Ok);
        assert_ne!(term, GcgsTermination::MaxIter, "{solver:?}");

        let n = unsafe { gcgs_result_dim(result) };
        let mut x = vec![0.0; n];
        assert_eq!(unsafe { gcgs_result_x(result, x.as_mut_ptr(), n) }, GcgsStatus::Ok);
        assert!(x.iter().map(|v| v.abs()).sum::<f64>() <= 2.0 + 1e-12);
        let mut short = vec![0.0; n - 1];
        assert_eq!(
            unsafe { gcgs_result_x(result, short.as_mut_ptr(), n - 1) },
            GcgsStatus::BufferTooSmall
        );

        let len = unsafe { gcgs_result_trace_len(result) };
        let mut row = GcgsIteration::default();
        assert_eq!(
            unsafe { gcgs_result_trace_row(result, len - 1, &mut row) },
            GcgsStatus::Ok
        );
        assert_eq!(row.iter + 1, len);
        assert!(
            term == GcgsTermination::Stalled || row.residual <= 1e-9,
            "{solver:?} {term:?} {}",
            row.residual
        );
        objectives.push(row.objective);
        assert_eq!(
            unsafe { gcgs_result_trace_row(result, len, &mut row) },
            GcgsStatus::InvalidArgument
        );
        unsafe { gcgs_result_free(result) };
    }
    for o in &objectives {
        assert!((o - objectives[0]).abs() <= 1e-8, "{objectives:?}");
    }
    unsafe { gcgs_enet_problem_free(problem) };
}

#[test]
fn ot_cluster_solve() {
    let mut problem = ptr::null_mut();
    let st = unsafe { gcgs_ot_problem_new_clusters(20, 20, 3, 0.1, 0, 1.7e-2, 1e3, 5, &mut problem) };
    assert_eq!(st, GcgsStatus::Ok);
    let (mut ns, mut nt) = (0, 0);
    assert_eq!(
        unsafe { gcgs_ot_problem_shape(problem, &mut ns, &mut nt) },
        GcgsStatus::Ok
    );
    assert_eq!((ns, nt), (20, 20));

    let mut opts = gcgs_solver_options_default();
    opts.gap_tol = 1e-6;
    opts.gap_relative = true;
    let mut result = ptr::null_mut();
    assert_eq!(
        unsafe { gcgs_ot_solve(problem, ptr::null(), &opts, &mut result) },
        GcgsStatus::Ok
    );
    let mut gamma = vec![0.0; ns * nt];
    assert_eq!(
        unsafe { gcgs_result_x(result, gamma.as_mut_ptr(), gamma.len()) },
        GcgsStatus::Ok
    );
    assert!(gamma.iter().all(|&g| g > 0.0));
    for i in 0..ns {
        let row: f64 = gamma[i * nt..(i + 1) * nt].iter().sum();
        assert!((row - 1.0 / ns as f64).abs() <= 1e-8);
    }
    let mut value = 0.0;
    assert_eq!(
        unsafe { gcgs_ot_objective(problem, gamma.as_ptr(), &mut value) },
        GcgsStatus::Ok
    );
    let mut row = GcgsIteration::default();
    let len = unsafe { gcgs_result_trace_len(result) };
    unsafe { gcgs_result_trace_row(result, len - 1, &mut row) };
    assert_eq!(value, row.objective);

    opts.solver = GcgsSolver::Spg;
    let mut other = ptr::null_mut();
    assert_eq!(
        unsafe { gcgs_ot_solve(problem, ptr::null(), &opts, &mut other) },
        GcgsStatus::InvalidArgument
    );
    assert!(other.is_null());
    assert!(last_error().contains("elastic net"));
    unsafe {
        gcgs_result_free(result);
        gcgs_ot_problem_free(problem);
    }
}

#[test]
fn explicit_entropic_problem_matches_sinkhorn() {
    let cost = [0.0, 1.0, 0.5, 1.0, 0.0, 0.7];
    let (a, b) = ([0.4, 0.6], [0.3, 0.3, 0.4]);
    let mut problem = ptr::null_mut();
    let st = unsafe {
        gcgs_ot_problem_new(
            cost.as_ptr(),
            2,
            3,
            a.as_ptr(),
            b.as_ptr(),
            0.1,
            0.0,
            ptr::null(),
            ptr::null(),
            ptr::null(),
            ptr::null(),
            0,
            &mut problem,
        )
    };
    assert_eq!(st, GcgsStatus::Ok);
    let mut plan = [0.0; 6];
    assert_eq!(
        unsafe {
            gcgs_sinkhorn(
                cost.as_ptr(),
                2,
                3,
                a.as_ptr(),
                b.as_ptr(),
                0.1,
                1e-12,
                10_000,
                plan.as_mut_ptr(),
            )
        },
        GcgsStatus::Ok
    );
    let mut opts = gcgs_solver_options_default();
    opts.gap_tol = 1e-12;
    let mut result = ptr::null_mut();
    assert_eq!(
        unsafe { gcgs_ot_solve(problem, ptr::null(), &opts, &mut result) },
        GcgsStatus::Ok
    );
    let mut gamma = [0.0; 6];
    unsafe { gcgs_result_x(result, gamma.as_mut_ptr(), 6) };
    for (g, p) in gamma.iter().zip(&plan) {
        assert!((g - p).abs() <= 1e-9);
    }
    unsafe {
        gcgs_result_free(result);
        gcgs_ot_problem_free(problem);
    }
}

#[test]
fn utilities() {
    let v = [3.0, -1.0, 0.5];
    let mut out = [0.0; 3];
    assert_eq!(
        unsafe { gcgs_project_l1(v.as_ptr(), 3, 2.0, out.as_mut_ptr()) },
        GcgsStatus::Ok
    );
    assert_eq!(out, [2.0, 0.0, 0.0]);
    assert_eq!(
        unsafe { gcgs_project_l1(v.as_ptr(), 3, -1.0, out.as_mut_ptr()) },
        GcgsStatus::InvalidArgument
    );

    let cost = [1.0, 0.0, 0.0, 1.0];
    let mu = [0.5, 0.5];
    let mut plan = [0.0; 4];
    assert_eq!(
        unsafe { gcgs_transport_lmo(cost.as_ptr(), 2, 2, mu.as_ptr(), mu.as_ptr(), plan.as_mut_ptr()) },
        GcgsStatus::Ok
    );
    assert_eq!(plan, [0.0, 0.5, 0.5, 0.0]);

    let skew = [0.3, 0.7];
    let st = unsafe {
        gcgs_sinkhorn(
            cost.as_ptr(),
            2,
            2,
            mu.as_ptr(),
            skew.as_ptr(),
            1e-1,
            1e-15,
            2,
            plan.as_mut_ptr(),
        )
    };
    assert_eq!(st, GcgsStatus::NotConverged);
    assert!(last_error().contains("did not reach tolerance"));

    let version = unsafe { CStr::from_ptr(gcgs_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_inputs_report_errors() {
    let mut problem = ptr::null_mut();
    let z = [1.0, 2.0];
    let st = unsafe { gcgs_enet_problem_new(z.as_ptr(), 2, 1, ptr::null(), GcgsLoss::Squared, 0.1, 1.0, &mut problem) };
    assert_eq!(st, GcgsStatus::NullPointer);
    assert!(last_error().contains('y'));
    assert!(problem.is_null());

    let y = [1.0, -1.0];
    let st = unsafe { gcgs_enet_problem_new(z.as_ptr(), 2, 1, y.as_ptr(), GcgsLoss::Squared, -1.0, 1.0, &mut problem) };
    assert_eq!(st, GcgsStatus::InvalidArgument);

    let st = unsafe {
        gcgs_enet_problem_new(
            z.as_ptr(),
            usize::MAX,
            2,
            y.as_ptr(),
            GcgsLoss::Squared,
            0.1,
            1.0,
            &mut problem,
        )
    };
    assert_eq!(st, GcgsStatus::Dimension);

    let st = unsafe { gcgs_enet_solve(ptr::null(), ptr::null(), ptr::null(), ptr::null_mut()) };
    assert_eq!(st, GcgsStatus::NullPointer);

    let mu = [0.5, 0.5];
    let cost = [0.0; 4];
    let lap = [0.0; 4];
    let st = unsafe {
        gcgs_ot_problem_new(
            cost.as_ptr(),
            2,
            2,
            mu.as_ptr(),
            mu.as_ptr(),
            0.1,
            1.0,
            lap.as_ptr(),
            ptr::null(),
            ptr::null(),
            ptr::null(),
            1,
            &mut ptr::null_mut(),
        )
    };
    assert_eq!(st, GcgsStatus::NullPointer);

    // success clears the previous message
    let mut out = [0.0; 2];
    unsafe { gcgs_project_l1(mu.as_ptr(), 2, 1.0, out.as_mut_ptr()) };
    assert!(gcgs_last_error_message().is_null());

    unsafe {
        gcgs_enet_problem_free(ptr::null_mut());
        gcgs_ot_problem_free(ptr::null_mut());
        gcgs_result_free(ptr::null_mut());
    }
}
