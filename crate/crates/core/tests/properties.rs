mod common;

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use lpg_core::assembly::{assemble_k, assemble_l, assemble_m, assemble_q, build_step_matrices, oracle_matrix, MatrixKind, OperatorSet};
use lpg_core::experiments::{fit_order, ManufacturedProblem};
use lpg_core::legendre::{c, legendre_deriv_eval, legendre_eval, BasisSpec};
use lpg_core::profile::Coefficients;
use lpg_core::quadrature::gauss_nodes;
use lpg_core::solver::{LpgSolver, SolverConfig, Source};
use lpg_core::stability::amplification_spectrum;
use nalgebra::DVector;
use proptest::prelude::*;

#[test]
fn legendre_orthogonality() {
    for q in [21, 24, 40] {
        let rule = gauss_nodes(q).unwrap();
        for j in 0..=20 {
            for k in 0..=20 {
                let v = rule.integrate(|x| legendre_eval(j, x).unwrap() * legendre_eval(k, x).unwrap());
                let expect = if j == k { 2.0 / (2 * k + 1) as f64 } else { 0.0 };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn sparsity_patterns() {
    for n in 3..=64 {
        let (l, q, k, m) = (assemble_l(n), assemble_q(n), assemble_k(n), assemble_m(n));
        let dim = n - 2;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    assert_eq!(l[(i, j)], 0.0);
                }
                if j < i {
                    assert_eq!(q[(i, j)], 0.0);
                }
                if i.abs_diff(j) >= 2 {
                    assert_eq!(k[(i, j)], 0.0);
                }
                if i.abs_diff(j) >= 4 {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
    }
    for n in [3, 7, 16, 33] {
        let dim = n - 2;
        let k = oracle_matrix(MatrixKind::K, n).unwrap();
        let m = oracle_matrix(MatrixKind::M, n).unwrap();
        let q = oracle_matrix(MatrixKind::Q, n).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                if i.abs_diff(j) >= 2 {
                    assert!(k[(i, j)].abs() < 1e-12);
                }
                if i.abs_diff(j) >= 4 {
                    assert!(m[(i, j)].abs() < 1e-12);
                }
                if j < i {
                    assert!(q[(i, j)].abs() < 1e-12);
                }
                assert_abs_diff_eq!(m[(i, j)], m[(j, i)], epsilon = 1e-14);
            }
        }
    }
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let cfg = SolverConfig::new(16, 1e-2, 1.0, Coefficients::constant(1.0, 0.3));
    let traj = LpgSolver::new(cfg).unwrap().run().unwrap();
    assert_eq!(traj.states.len(), 101);
    assert!(traj.states.iter().all(|s| s.coeffs.iter().all(|&v| v == 0.0)));
}

#[test]
fn spectral_radius_grid() {
    for alpha in [0.1, 0.5, 1.0] {
        for beta in [0.0, 0.1, 0.3] {
            let rep = amplification_spectrum(42, 1.0, alpha, beta).unwrap();
            assert!(rep.spectral_radius <= 1.0 + 1e-8, "alpha {alpha} beta {beta}: {}", rep.spectral_radius);
            assert!(rep.max_residual < 1e-6, "residual {}", rep.max_residual);
        }
    }
}

#[test]
fn oracle_and_closed_form_l_q_agree_for_many_degrees() {
    for n in 3..=40 {
        let basis = BasisSpec::new(n).unwrap();
        let ops = OperatorSet::from_weak_form(basis).unwrap();
        assert!((&ops.l - assemble_l(n)).amax() < 1e-10);
        assert!((&ops.q - assemble_q(n)).amax() < 1e-10);
    }
}

fn random_coeffs(dim: usize, seed: &[f64]) -> DVector<f64> {
    DVector::from_fn(dim, |i, _| seed[i % seed.len()] / (1.0 + i as f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauss_exactness(q in 1usize..40, d in 0usize..79) {
        prop_assume!(d < 2 * q);
        let rule = gauss_nodes(q).unwrap();
        let v = rule.integrate(|x| x.powi(d as i32));
        let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
        prop_assert!((v - exact).abs() < 1e-13, "q={} d={} got {} want {}", q, d, v, exact);
    }

    #[test]
    fn phi_derivative_identity(degree in 3usize..40, xs in prop::collection::vec(-1.0f64..=1.0, 100)) {
        for n in 0..=degree - 3 {
            for &x in &xs {
                let d = c(n + 1) * (legendre_deriv_eval(n, x).unwrap() - legendre_deriv_eval(n + 2, x).unwrap());
                prop_assert!((d + legendre_eval(n + 1, x).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trial_boundary_conditions(degree in 3usize..64) {
        let basis = BasisSpec::new(degree).unwrap();
        for n in 0..basis.dim() {
            let right = basis.trial_derivs(n, 1.0).unwrap();
            let left = basis.trial_derivs(n, -1.0).unwrap();
            prop_assert_eq!(right[0], 0.0);
            prop_assert_eq!(left[0], 0.0);
            prop_assert!(right[1].abs() < 1e-12);
        }
    }

    #[test]
    fn poincare_inequality(degree in 3usize..40, seed in prop::collection::vec(-1.0f64..1.0, 1..40)) {
        let basis = BasisSpec::new(degree).unwrap();
        let u = random_coeffs(basis.dim(), &seed);
        let rule = gauss_nodes((2 * degree).max(8)).unwrap();
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let d = common::trial_combination(&basis, &u, x);
            lhs += w * d[0] * d[0] / (1.0 - x).powi(3);
            rhs += w * d[1] * d[1] / (1.0 - x);
        }
        prop_assert!(lhs <= rhs * (1.0 + 1e-8), "{} > {}", lhs, rhs);
    }

    #[test]
    fn weak_form_residual(degree in 3usize..33, dt in 1e-4f64..1.0, alpha in 0.0f64..2.0, beta in 0.0f64..1.0,
                          seed in prop::collection::vec(-1.0f64..1.0, 1..32)) {
        let basis = BasisSpec::new(degree).unwrap();
        let ops = OperatorSet::from_weak_form(basis).unwrap();
        let mats = build_step_matrices(&ops, dt, alpha, beta).unwrap();
        let u = random_coeffs(basis.dim(), &seed);
        let reference = common::weak_form_apply(&basis, &u, dt, alpha, beta);
        let got = &mats.a * &u;
        prop_assert!((&got - &reference).amax() < 1e-9, "{}", (&got - &reference).amax());
        // A + B = 2M up to rounding in the two sums.
        let sum = &mats.a + &mats.b - &ops.m * 2.0;
        prop_assert!(sum.amax() <= 4.0 * f64::EPSILON * (ops.m.amax() + mats.a.amax()));
    }

    #[test]
    fn linearity(degree in 6usize..20, a in -2.0f64..2.0, b in -2.0f64..2.0, beta in 0.0f64..0.5) {
        let coeffs = Coefficients::constant(1.0, beta);
        let run = |u0: Arc<dyn Fn(f64) -> f64 + Send + Sync>, f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>| {
            let cfg = SolverConfig::new(degree, 1e-2, 0.2, coeffs.clone())
                .with_initial(move |x| u0(x))
                .with_source(Source::Function(f));
            LpgSolver::new(cfg).unwrap().run().unwrap()
        };
        let v = |x: f64| (1.0 - x * x) * (1.0 - x) * (2.0 * x).sin();
        let w = |x: f64| (1.0 - x).powi(2) * (1.0 + x) * x.cos();
        let g = |x: f64, t: f64| (3.0 * x + t).cos();
        let h = |x: f64, t: f64| x * x * (-t).exp();
        let combined = run(Arc::new(move |x| a * v(x) + b * w(x)), Arc::new(move |x, t| a * g(x, t) + b * h(x, t)));
        let r1 = run(Arc::new(v), Arc::new(g));
        let r2 = run(Arc::new(w), Arc::new(h));
        for ((s, s1), s2) in combined.states.iter().zip(&r1.states).zip(&r2.states) {
            let lin = &s1.coeffs * a + &s2.coeffs * b;
            let scale = lin.amax().max(s.coeffs.amax()).max(1e-300);
            prop_assert!((&s.coeffs - &lin).amax() <= 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn energy_bound_without_source(degree in 4usize..24, alpha in 0.34f64..3.0, beta in 0.0f64..1.0,
                                   dt in 1e-3f64..0.2, seed in prop::collection::vec(-1.0f64..1.0, 1..24)) {
        let basis = BasisSpec::new(degree).unwrap();
        let u0 = random_coeffs(basis.dim(), &seed);
        let b2 = basis;
        let init = u0.clone();
        let cfg = SolverConfig::new(degree, dt, 500.0 * dt, Coefficients::constant(alpha, beta))
            .with_initial(move |x| common::trial_combination(&b2, &init, x)[0]);
        let solver = LpgSolver::new(cfg).unwrap();
        let n0 = common::omega_norm_sq(&basis, &solver.project_initial().unwrap().coeffs);
        let mut worst = 0.0f64;
        solver.run_with(|s| {
            worst = worst.max(common::omega_norm_sq(&basis, &s.coeffs));
            Ok(())
        }).unwrap();
        prop_assert!(worst <= 8.0 * n0 * (1.0 + 1e-12), "{} > 8 * {}", worst, n0);
    }

    #[test]
    fn fit_order_recovers_power_laws(r in 0.5f64..4.0, c0 in 1e-6f64..10.0, hs in prop::collection::vec(1e-5f64..1e-1, 3..12)) {
        prop_assume!(hs.iter().any(|h| (h / hs[0] - 1.0).abs() > 1e-3));
        let pairs: Vec<(f64, f64)> = hs.iter().map(|&h| (h, c0 * h.powf(r))).collect();
        let fit = fit_order(&pairs).unwrap();
        prop_assert!((fit.order - r).abs() < 1e-8);
    }

    #[test]
    fn manufactured_residual_vanishes(x in -1.0f64..=1.0, t in 0.0f64..=1.0, alpha in 0.1f64..5.0, beta in 0.0f64..2.0) {
        let p = ManufacturedProblem::new(Coefficients::constant(alpha, beta));
        let sep = p.separable_source().eval(x, t).unwrap();
        let r = common::manufactured_residual(&p, x, t, alpha, beta, sep);
        prop_assert!(r.abs() < 1e-8, "{}", r);
    }
}
