use super::*;
use crate::convex::{prox_h, prox_h_conj};
use crate::linalg::{frob_dot, Dual};
use crate::manifold::{random_point, tangent_project};
use crate::problem::testing::gaussian;
use crate::problem::{make_spca, Fpca, Spca};
use crate::rada::{
    evaluate, phi_k_grad, riemannian_grad, run_rada, y_half_from, InnerSolver, RadaConfig,
};
use alloc::vec::Vec;

fn spca() -> Spca {
    make_spca(gaussian(20, 10, 11), 3, 0.5).unwrap()
}

#[test]
fn window_rule_examples() {
    let tol = 1e-8;
    let falling: Vec<f64> = (0..50).map(|i| -2.0 * tol * i as f64).collect();
    for n in 1..=falling.len() {
        assert!(!stop_window(&falling[..n], tol, 5));
    }
    assert!(stop_window(&[3.0; 6], tol, 5));
    assert!(!stop_window(&[3.0; 5], tol, 5));
    // Sawtooth inside the band: fires exactly once W steps have passed.
    let saw: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { 1.0 - 0.4 * tol }).collect();
    assert!(!stop_window(&saw[..4], tol, 4));
    assert!(stop_window(&saw[..5], tol, 4));
}

proptest::proptest! {
    #[test]
    fn window_rule_matches_entrywise_test(
        hist in proptest::collection::vec(-1.0f64..1.0, 1..40),
        window in 1usize..10,
        tol in 0.0f64..0.5,
    ) {
        // Fires iff no entry in the last W undercuts the earlier best by tol.
        let n = hist.len();
        let expected = n > window && {
            let mut earlier = hist[..n - window].to_vec();
            earlier.sort_by(|a, b| a.partial_cmp(b).unwrap());
            hist[n - window..].iter().all(|&v| earlier[0] - v < tol)
        };
        proptest::prop_assert_eq!(stop_window(&hist, tol, window), expected);
    }
}

#[test]
fn power_schedule() {
    let s = Power {
        coef: 10.0,
        exponent: -1.0 / 3.0,
    };
    assert!((s.at(8) - 5.0).abs() < 1e-14);
    let sigma = Power {
        coef: 1e-7,
        exponent: 1.5,
    };
    assert!((sigma.at(4) - 8e-7).abs() < 1e-20);
}

#[test]
fn config_validation() {
    let mut cfg = BaselineConfig::new(Baseline::Radmm, 1e-6);
    assert!(cfg.validate().is_ok());
    cfg.window = 0;
    assert!(cfg.validate().is_err());
    let mut cfg = BaselineConfig::new(Baseline::Dsgm, 1e-6);
    cfg.smoothing.coef = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn arpgda_tiny_step_follows_negative_gradient() {
    let p = spca();
    let x0 = random_point(p.manifold(), 2);
    let y0 = prox_h(&p.prox_family(), &Dual::from_fn(60, |i, _| ((i as f64) * 0.3).sin()), 1.0);
    let mut cfg = BaselineConfig::new(Baseline::Arpgda, 1e-6);
    cfg.max_iters = 1;
    cfg.line_search.zeta_init = 1e-8;
    let rep = run_arpgda(&p, &cfg, x0.clone(), y0.clone()).unwrap();
    let g = riemannian_grad(&p, &x0, &y0).unwrap();
    let moved = (rep.x.basis() - x0.basis()) / 1e-8;
    assert!((&moved + g.matrix()).norm() <= 1e-5 * g.norm());
    // Directional derivative of F(·, y_0) along the step is −‖g‖² < 0.
    let egrad = p.f_grad(x0.basis()) + p.a_adjoint(x0.basis(), &y0);
    assert!(frob_dot(&egrad, &moved) < 0.0);
}

#[test]
fn arpgda_gradient_is_previous_value_function_gradient() {
    let p = spca();
    let mut cfg = BaselineConfig::new(Baseline::Arpgda, 1e-10);
    cfg.beta = Power {
        coef: 20.0,
        exponent: -1.5,
    };
    cfg.max_iters = 200;
    cfg.window = 50;
    cfg.diagnostics = true;
    let rep = run_arpgda(&p, &cfg, random_point(p.manifold(), 4), Dual::zeros(60)).unwrap();
    let d = rep.diagnostics;
    assert!(d.gradient_identity_gap <= 1e-12, "{}", d.gradient_identity_gap);
    assert!(d.max_dual_infeasibility <= 1e-12);
    assert!(d.min_armijo_slack >= 0.0);

    // Spot check by hand at one iterate: y_k maximizes F_{k−1}(x_k, ·).
    let x = random_point(p.manifold(), 9);
    let y_prev = Dual::from_fn(60, |i, _| 0.5 * ((i as f64) * 0.7).cos());
    let (lambda, beta) = (0.2, 0.4);
    let y_k = y_half_from(&p.prox_family(), &p.a_apply(x.basis()), &y_prev, lambda, beta);
    let lhs = riemannian_grad(&p, &x, &y_k).unwrap();
    let rhs = tangent_project(&x, &phi_k_grad(&p, x.basis(), &y_prev, lambda, beta)).unwrap();
    assert!((lhs.matrix() - rhs.matrix()).norm() <= 1e-12);
}

#[test]
fn dsgm_large_smoothing_limit() {
    let p = spca();
    let x = random_point(p.manifold(), 5);
    let h = p.prox_family();
    let g = smoothed_grad(&p, x.basis(), 1e12);
    let analytic = p.f_grad(x.basis()) + p.a_adjoint(x.basis(), &prox_h(&h, &Dual::zeros(60), 1.0));
    assert!((g - analytic).norm() <= 1e-10);
    let f = Fpca::from_columns(&gaussian(8, 6, 2), 2).unwrap();
    let x = random_point(f.manifold(), 5);
    let g = smoothed_grad(&f, x.basis(), 1e12);
    let analytic = f.f_grad(x.basis()) + f.a_adjoint(x.basis(), &f.prox_family().origin_projection());
    assert!((g - analytic).norm() <= 1e-8);
}

#[test]
fn dsgm_gradient_matches_finite_differences() {
    fn check<P: Problem>(p: &P, lambda: f64) {
        let (n, k) = p.manifold().shape();
        for s in 0..10u64 {
            let x = random_point(p.manifold(), 30 + s);
            let u = tangent_project(&x, &gaussian(n, k, 60 + s)).unwrap().0;
            let u = &u / u.norm();
            let e = 1e-6;
            let fp = dsgm_objective(p, &(x.basis() + &u * e), lambda).value;
            let fm = dsgm_objective(p, &(x.basis() - &u * e), lambda).value;
            let fd = (fp - fm) / (2.0 * e);
            let an = frob_dot(&smoothed_grad(p, x.basis(), lambda), &u);
            assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "fd {fd} vs {an}");
        }
    }
    check(&spca(), 0.3);
    check(&Fpca::from_columns(&gaussian(15, 8, 3), 2).unwrap(), 0.5);
}

#[test]
fn radmm_p_step_limits_and_routes() {
    let h = crate::convex::ProxFamily::linf_ball(0.5, 12).unwrap();
    let a = Dual::from_fn(12, |i, _| (i as f64) * 0.3 - 1.5);
    let y = Dual::from_fn(12, |i, _| 0.4 * ((i as f64) * 1.3).sin());
    let far = radmm_p_step(&h, 0.1, 1e12, &a, &y);
    assert!((far - &a).norm() <= 1e-6);
    // At σ = 1/β the p-step matches the convex combination
    // β/(λ+β)·prox_{(λ+β)h*}(a + βy) + λ/(λ+β)·(a + βy).
    for &(lambda, beta) in &[(0.1, 0.5), (1e-3, 2.0), (0.7, 0.05)] {
        let v = &a + &y * beta;
        let t = lambda + beta;
        let closed = prox_h_conj(&h, &v, t) * (beta / t) + &v * (lambda / t);
        let p_sgs = sgs_p_step(&h, lambda, beta, &a, &y);
        assert!((&p_sgs - &closed).norm() <= 1e-12);
        let p_admm = radmm_p_step(&h, lambda, 1.0 / beta, &a, &y);
        assert!((&p_admm - &closed).norm() <= 1e-12);
    }
}

#[test]
fn radmm_run_keeps_p_step_exact() {
    let p = spca();
    let mut cfg = BaselineConfig::new(Baseline::Radmm, 1e-6);
    cfg.sigma = Power {
        coef: 1.0,
        exponent: 0.5,
    };
    cfg.smoothing = Power {
        coef: 1.0,
        exponent: -1.0 / 3.0,
    };
    cfg.max_iters = 150;
    cfg.window = 30;
    cfg.diagnostics = true;
    let x0 = random_point(p.manifold(), 6);
    let rep = run_radmm(&p, &cfg, x0, p.prox_family().origin_projection()).unwrap();
    let d = rep.diagnostics;
    assert!(d.max_p_step_residual <= 1e-9, "{}", d.max_p_step_residual);
    assert!(d.max_dual_infeasibility <= 1e-12, "{}", d.max_dual_infeasibility);
    assert!(d.min_armijo_slack >= 0.0);
    assert!(rep.phi.is_finite());
}

#[test]
fn sgs_first_direction_and_dual_step_match_rada() {
    let p = spca();
    let h = p.prox_family();
    let x = random_point(p.manifold(), 7);
    let y = prox_h(&h, &Dual::from_fn(60, |i, _| ((i as f64) * 0.9).cos()), 1.0);
    let (lambda, beta) = (0.05, 0.8);
    let a = p.a_apply(x.basis());
    let pv = sgs_p_step(&h, lambda, beta, &a, &y);
    let multiplier = &y + (&a - &pv) / beta;
    let ev = evaluate(&p, x.basis(), &y, lambda, beta);
    assert!((&multiplier - &ev.y_half).norm() <= 1e-12);
    let g_sgs = riemannian_grad(&p, &x, &multiplier).unwrap();
    let g_rada = tangent_project(&x, &phi_k_grad(&p, x.basis(), &y, lambda, beta)).unwrap();
    assert!((g_sgs.matrix() - g_rada.matrix()).norm() <= 1e-12);
}

#[test]
fn sgs_admm_reproduces_rada_rgd_trajectory() {
    let p = spca();
    for (seed, t) in [(1u64, 1usize), (2, 3)] {
        let mut cfg = RadaConfig::new(1e-12, 20.0 * 3f64.sqrt(), t, InnerSolver::RiemannianGradient);
        cfg.max_iters = 30;
        cfg.record_trajectory = true;
        let x0 = random_point(p.manifold(), seed);
        let rada = run_rada(&p, &cfg, x0.clone(), Dual::zeros(60)).unwrap();
        let sgs = run_sgs_admm(&p, &cfg, x0, Dual::zeros(60)).unwrap();
        assert_eq!(rada.trajectory.len(), 31);
        assert_eq!(sgs.trajectory.len(), 31);
        let mut worst = 0.0f64;
        for ((xr, yr), (xs, ys)) in rada.trajectory.iter().zip(&sgs.trajectory) {
            worst = worst.max((xr - xs).norm()).max((yr - ys).norm());
        }
        assert!(worst <= 1e-8, "T = {t}: trajectories differ by {worst:e}");
    }
}

#[test]
fn arpgda_terminates_by_window_on_fpca() {
    let f = Fpca::from_columns(&gaussian(30, 6, 8), 2).unwrap();
    let x0 = random_point(f.manifold(), 3);
    let m = 6.0f64;
    let alg = Baseline::Arpgda;
    let mut cfg = BaselineConfig::new(alg, 1e-8);
    cfg.beta = Power {
        coef: 1e3 * m * m * 2f64.sqrt(),
        exponent: -1.5,
    };
    cfg.window = 100;
    cfg.max_iters = 20_000;
    cfg.diagnostics = true;
    let rep = run_baseline(&f, &cfg, x0.clone(), f.prox_family().origin_projection()).unwrap_or_else(|e| panic!("{}: {e}", alg.name()));
    assert!(rep.converged, "{} did not stop in {} iterations", alg.name(), rep.iterations);
    assert_eq!(rep.algorithm, alg.name());
    assert!(rep.phi.is_finite());
    assert!(rep.diagnostics.max_dual_infeasibility <= 1e-12);
}

#[test]
fn smoothing_baselines_keep_improving_as_smoothing_shrinks() {
    let f = Fpca::from_columns(&gaussian(30, 6, 8), 2).unwrap();
    let x0 = random_point(f.manifold(), 3);
    for alg in [Baseline::Dsgm, Baseline::Radmm] {
        let mut cfg = BaselineConfig::new(alg, 1e-8);
        cfg.window = 100;
        cfg.max_iters = 4000;
        cfg.log_every = 1000;
        cfg.diagnostics = true;
        let rep = run_baseline(&f, &cfg, x0.clone(), f.prox_family().origin_projection()).unwrap();
        let phis: Vec<f64> = rep.records.iter().map(|r| r.phi).collect();
        assert!(phis.windows(2).all(|w| w[1] < w[0]), "{}: {phis:?}", alg.name());
        assert!(rep.diagnostics.min_armijo_slack >= -1e-12);
        assert!(rep.diagnostics.max_dual_infeasibility <= 1e-12);
        assert!(rep.diagnostics.max_p_step_residual <= 1e-9);
    }
}


/// Steps of 1e6 along −g with no backtracking overshoot on every iteration.
fn overshooting() -> LineSearchConfig {
    LineSearchConfig {
        zeta_min: 1e6,
        zeta_max: 1e7,
        zeta_init: 1e6,
        max_backtracks: 0,
        ..LineSearchConfig::default()
    }
}

#[test]
fn failed_line_searches_become_null_steps() {
    let p = Fpca::from_columns(&gaussian(12, 5, 3), 2).unwrap();
    let y0 = p.prox_family().origin_projection();
    for alg in [Baseline::Arpgda, Baseline::Dsgm, Baseline::Radmm] {
        let mut c = BaselineConfig::new(alg, 1e-8);
        c.line_search = overshooting();
        c.window = 5;
        c.max_iters = 200;
        let x0 = random_point(p.manifold(), 8);
        let rep = run_baseline(&p, &c, x0.clone(), y0.clone()).unwrap();
        assert!(rep.diagnostics.null_steps > 0, "{}", alg.name());
        assert!(rep.phi.is_finite());
        if rep.diagnostics.null_steps == rep.iterations {
            assert_eq!(rep.x.basis(), x0.basis());
            assert!(rep.converged);
        }
    }
}

#[test]
fn rada_inner_loop_keeps_the_point_when_no_step_passes() {
    let p = spca();
    let mut cfg = RadaConfig::new(1e-8, 20.0 * 3f64.sqrt(), 3, InnerSolver::RiemannianGradient);
    cfg.line_search = overshooting();
    cfg.max_iters = 20;
    cfg.log_every = 1;
    let rep = run_rada(&p, &cfg, random_point(p.manifold(), 2), Dual::zeros(60)).unwrap();
    assert!(rep.diagnostics.null_steps > 0);
    assert!(rep.records.iter().all(|r| r.inner_steps <= 3));
    let sgs = run_sgs_admm(&p, &cfg, random_point(p.manifold(), 2), Dual::zeros(60)).unwrap();
    assert_eq!(sgs.diagnostics.null_steps, rep.diagnostics.null_steps);
}
