mod common;

use std::sync::Arc;
use std::thread;

use common::*;
use loire::bench::{generate_regression, RegressionSpec};
use loire::loire::{default_tol, Adda, DEFAULT_MAX_ITER};
use loire::{loire_objective, loire_solve, DenseMatrix, DenseVector, LoireConfig};
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64) -> (DenseMatrix, DenseVector, f64) {
    let mut r = rng(seed);
    let m = r.random_range(5..=60);
    let n = r.random_range(1..=8.min(m - 1));
    let outliers = r.random_range(0..=m / 5);
    let inst = generate_regression(&RegressionSpec {
        m,
        n,
        outliers,
        noise_sigma: 0.1,
        outlier_min: 5.0,
        outlier_max: 50.0,
        seed,
    })
    .unwrap();
    // thresholds between one and ten noise deviations
    let lambda = 1.0 / r.random_range(0.1..1.0);
    (inst.a, inst.y, lambda)
}

#[test]
fn both_half_steps_descend() {
    for seed in 1..=100 {
        let (a, y, lambda) = instance(seed);
        let mut state = Adda::new(&a, &y, lambda).unwrap();
        let mut f = state.objective();
        for _ in 0..200 {
            state.update_x();
            let fx = state.objective();
            assert!(fx <= f + 1e-12 * (1.0 + f), "seed {seed}: x-step {f} -> {fx}");
            let delta = state.update_b();
            let fb = state.objective();
            assert!(fb <= fx + 1e-12 * (1.0 + fx), "seed {seed}: b-step {fx} -> {fb}");
            f = fb;
            if delta <= default_tol(&y) {
                break;
            }
        }
    }
}

#[test]
fn default_settings_converge_with_monotone_trace() {
    for seed in 1..=100 {
        let (a, y, lambda) = instance(seed);
        let cfg = LoireConfig::with_defaults(lambda, &y).unwrap();
        let sol = loire_solve(&a, &y, &cfg).unwrap();
        assert!(sol.converged, "seed {seed}");
        assert!(sol.iterations <= DEFAULT_MAX_ITER);
        for w in sol.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0]), "seed {seed}");
        }
    }
}

#[test]
fn returned_point_is_a_fixed_point() {
    for seed in 1..=50 {
        let (a, y, lambda) = instance(seed);
        let cfg = LoireConfig::with_defaults(lambda, &y).unwrap();
        let sol = loire_solve(&a, &y, &cfg).unwrap();
        let rows = to_rows(&a);
        let tau = 1.0 / lambda;
        let target: Vec<f64> = y.iter().zip(sol.b.iter()).map(|(p, q)| p - q).collect();
        let x1 = loire::least_squares_solve(&a, &to_vector(&target)).unwrap().to_vec();
        let fit = matvec(&rows, &x1);
        let b1: Vec<f64> = y
            .iter()
            .zip(&fit)
            .map(|(yi, fi)| {
                let r = yi - fi;
                r.signum() * (r.abs() - tau).max(0.0)
            })
            .collect();
        let dx: Vec<f64> = x1.iter().zip(sol.x.iter()).map(|(p, q)| p - q).collect();
        let db: Vec<f64> = b1.iter().zip(sol.b.iter()).map(|(p, q)| p - q).collect();
        assert!(norm2(&dx) <= cfg.tol, "seed {seed}: dx {}", norm2(&dx));
        assert!(norm2(&db) <= cfg.tol, "seed {seed}: db {}", norm2(&db));
    }
}

/// Optimality conditions of the joint convex problem.
pub fn kkt_violation(a: &DenseMatrix, y: &DenseVector, x: &DenseVector, b: &DenseVector, lambda: f64) -> (f64, f64) {
    let rows = to_rows(a);
    let fit = matvec(&rows, &x.to_vec());
    let e: Vec<f64> = (0..y.len()).map(|i| y[i] - fit[i] - b[i]).collect();
    let grad_x = matvec(&transpose(&rows), &e);
    let gx = grad_x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut gb = 0.0f64;
    for i in 0..y.len() {
        let s = lambda * e[i];
        let viol = if b[i] != 0.0 {
            (s - b[i].signum()).abs()
        } else {
            (s.abs() - 1.0).max(0.0)
        };
        gb = gb.max(viol);
    }
    (gx, gb)
}

#[test]
fn converged_runs_satisfy_the_subgradient_conditions() {
    for seed in 1..=100 {
        let (a, y, lambda) = instance(seed);
        let cfg = LoireConfig::with_defaults(lambda, &y).unwrap();
        let sol = loire_solve(&a, &y, &cfg).unwrap();
        assert!(sol.converged);
        let (gx, gb) = kkt_violation(&a, &y, &sol.x, &sol.b, lambda);
        assert!(gx <= 1e-6, "seed {seed}: gradient in x {gx}");
        assert!(gb <= 1e-6, "seed {seed}: subgradient in b {gb}");
    }
}

#[test]
fn subgradient_gap_is_bounded_by_lambda_times_tol() {
    // after the closing x-step the x-gradient vanishes and the b-conditions
    // are off by at most lambda * ||b_last - b_prev||
    for seed in 1..=50 {
        let (a, y, _) = instance(seed);
        for lambda in [0.05, 1.0, 50.0] {
            let cfg = LoireConfig::new(lambda, default_tol(&y), 100_000).unwrap();
            let sol = loire_solve(&a, &y, &cfg).unwrap();
            assert!(sol.converged, "seed {seed} lambda {lambda}: {} iterations", sol.iterations);
            let (gx, gb) = kkt_violation(&a, &y, &sol.x, &sol.b, lambda);
            assert!(gx <= 1e-9 * (1.0 + y.l2_norm()) * (1.0 + a.frobenius_norm()));
            assert!(gb <= lambda * cfg.tol * (1.0 + 1e-6), "seed {seed} lambda {lambda}: {gb}");
        }
    }
}

#[test]
fn exact_data_is_recovered() {
    for seed in 1..=100 {
        let mut r = rng(seed);
        let m = r.random_range(3..=40);
        let n = r.random_range(1..m);
        let inst = generate_regression(&RegressionSpec {
            m,
            n,
            outliers: 0,
            noise_sigma: 0.0,
            outlier_min: 0.0,
            outlier_max: 0.0,
            seed,
        })
        .unwrap();
        let cfg = LoireConfig::with_defaults(1.0, &inst.y).unwrap();
        let sol = loire_solve(&inst.a, &inst.y, &cfg).unwrap();
        let err: Vec<f64> = sol.x.iter().zip(inst.x_true.iter()).map(|(p, q)| p - q).collect();
        assert!(norm2(&err) <= 1e-8 * (1.0 + inst.x_true.l2_norm()), "seed {seed}");
        assert_eq!(sol.b.max_abs(), 0.0, "seed {seed}");
    }
}

#[test]
fn single_outlier_location_example() {
    let a = DenseMatrix::from_element(4, 1, 1.0).unwrap();
    let y = [1.0, 1.0, 1.0, 11.0];
    let cfg = LoireConfig::new(1.0, 1e-12, 10_000).unwrap();
    let sol = loire_solve(&a, &to_vector(&y), &cfg).unwrap();
    let (x_ref, b_ref) = scalar_location_oracle(&y, 1.0);

    let nonzero: Vec<usize> = (0..4).filter(|&i| sol.b[i] != 0.0).collect();
    assert_eq!(nonzero, vec![3]);
    assert!((sol.x[0] - 1.0).abs() <= 0.5);
    // a derivative-free search pins a smooth minimizer to about sqrt(eps)
    assert!((sol.x[0] - x_ref).abs() <= 1e-6, "{} vs {x_ref}", sol.x[0]);
    for i in 0..4 {
        assert!((sol.b[i] - b_ref[i]).abs() <= 1e-6, "{i}: {} vs {}", sol.b[i], b_ref[i]);
    }
    let ones = vec![vec![1.0]; 4];
    let f = naive_loire_objective(&ones, &y, &[sol.x[0]], &sol.b.to_vec(), 1.0);
    let f_ref = naive_loire_objective(&ones, &y, &[x_ref], &b_ref, 1.0);
    assert!(f <= f_ref + 1e-10);
}

proptest! {
    #[test]
    fn objective_matches_naive_loops(
        seed in any::<u64>(),
        m in 1usize..20,
        n in 1usize..6,
        lambda in 0.01f64..100.0,
    ) {
        let mut r = rng(seed);
        let rows = random_rows(&mut r, m, n, -5.0, 5.0);
        let y = random_vec(&mut r, m, -10.0, 10.0);
        let x = random_vec(&mut r, n, -2.0, 2.0);
        let b = random_vec(&mut r, m, -3.0, 3.0);
        let got = loire_objective(&to_matrix(&rows), &to_vector(&y), &to_vector(&x), &to_vector(&b), lambda).unwrap();
        let want = naive_loire_objective(&rows, &y, &x, &b, lambda);
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn zero_residual_objective_is_l1_of_b(seed in any::<u64>(), m in 1usize..15) {
        let mut r = rng(seed);
        let rows = random_rows(&mut r, m, 2, -1.0, 1.0);
        let x = random_vec(&mut r, 2, -1.0, 1.0);
        let b = random_vec(&mut r, m, -4.0, 4.0);
        let fit = matvec(&rows, &x);
        let y: Vec<f64> = fit.iter().zip(&b).map(|(p, q)| p + q).collect();
        let got = loire_objective(&to_matrix(&rows), &to_vector(&y), &to_vector(&x), &to_vector(&b), 3.0).unwrap();
        let l1: f64 = b.iter().map(|v| v.abs()).sum();
        prop_assert!((got - l1).abs() <= 1e-10 * (1.0 + l1));
    }
}

#[test]
fn concurrent_solves_on_shared_inputs_agree() {
    let (a, y, lambda) = instance(11);
    let cfg = LoireConfig::with_defaults(lambda, &y).unwrap();
    let reference = loire_solve(&a, &y, &cfg).unwrap();
    let shared = Arc::new((a, y));
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let shared = Arc::clone(&shared);
            thread::spawn(move || loire_solve(&shared.0, &shared.1, &cfg).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), reference);
    }
}
