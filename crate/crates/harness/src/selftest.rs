//! Invariant suites runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rada_core::baselines::{run_baseline, run_sgs_admm, Baseline, BaselineConfig};
use rada_core::convex::{moreau_env_value, prox_h, prox_h_conj, Envelope, ProxFamily};
use rada_core::linalg::{frob_dot, orthonormality_residual, sym_eigen_ascending, Dual, Mat};
use rada_core::manifold::{random_point, retract, tangent_project, ManifoldPoint, FEASIBILITY_TOL};
use rada_core::problem::{
    affinity_inner_abs, build_laplacian, gen_gaussian_points, make_spca, make_ssc, spectral_init, Fpca, Problem, Spca,
    Ssc,
};
use rada_core::rada::{phi_k_grad, phi_k_grad_moreau, phi_k_value, run_rada, InnerSolver, PgdStep, RadaConfig};

use crate::metrics::{nmi, normalized_variance};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    /// Pass when `value <= tol`.
    pub tol: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value <= self.tol
    }
}

/// The instances the oracle suites run on.
pub fn small_spca() -> Spca {
    make_spca(gen_gaussian_points(20, 10, 1).points, 3, 0.5).expect("valid SPCA instance")
}

pub fn small_fpca() -> Fpca {
    Fpca::from_columns(&gen_gaussian_points(15, 8, 2).points, 2).expect("valid FPCA instance")
}

pub fn small_ssc() -> Ssc {
    let l = build_laplacian(&affinity_inner_abs(&gen_gaussian_points(5, 12, 3).points)).expect("connected graph");
    make_ssc(l, 3, 0.05).expect("valid SSC instance")
}

fn gaussian_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_feasible(h: &ProxFamily, rng: &mut ChaCha8Rng, scale: f64) -> Dual {
    prox_h(h, &Dual::from_fn(h.len(), |_, _| rng.random_range(-scale..scale)), 1.0)
}

/// Worst relative error of `⟨∇Φ_k(x), U⟩` against central differences of
/// `Φ_k` along random unit directions, at `points` random points.
pub fn phi_k_fd_worst<P: Problem>(p: &P, points: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = p.prox_family();
    let (lambda, beta) = (0.05, 0.3);
    let step = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..points {
        let x = random_point(p.manifold(), seed.wrapping_mul(1000) + i);
        let (rows, cols) = p.manifold().shape();
        let mut u = gaussian_mat(&mut rng, rows, cols);
        u /= u.norm();
        let y_k = random_feasible(&h, &mut rng, 2.0 * h.dual_radius().max(1.0));
        let g = phi_k_grad(p, x.basis(), &y_k, lambda, beta);
        let an = frob_dot(&g, &u);
        let plus = phi_k_value(p, &(x.basis() + &u * step), &y_k, lambda, beta).unwrap_or(f64::NAN);
        let minus = phi_k_value(p, &(x.basis() - &u * step), &y_k, lambda, beta).unwrap_or(f64::NAN);
        let fd = (plus - minus) / (2.0 * step);
        let err = (fd - an).abs() / an.abs().max(1.0);
        worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
    }
    worst
}

/// Worst residuals of `v = prox_{th}(v) + t prox_{h*/t}(v/t)` and of
/// `M_{th}(v) + M_{h*/t}(v/t) = ‖v‖²/(2t)` over random `(v, t)`.
pub fn moreau_identity_worst(h: &ProxFamily, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decomposition = 0.0f64;
    let mut envelope = 0.0f64;
    for _ in 0..samples {
        let v = Dual::from_fn(h.len(), |_, _| rng.random_range(-3.0..3.0));
        let t = libm::pow(10.0, rng.random_range(-2.0..1.5));
        let split = prox_h(h, &v, t) + prox_h_conj(h, &(&v / t), 1.0 / t) * t;
        decomposition = decomposition.max((split - &v).norm() / v.norm().max(1.0));
        let lhs = moreau_env_value(h, Envelope::Indicator, &v, t) + moreau_env_value(h, Envelope::Conjugate, &(&v / t), 1.0 / t);
        let rhs = v.norm_squared() / (2.0 * t);
        envelope = envelope.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    (decomposition, envelope)
}

/// Worst gap between the prox-route and envelope-route gradients of `Φ_k`.
pub fn gradient_formula_gap<P: Problem>(p: &P, points: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = p.prox_family();
    let mut worst = 0.0f64;
    for i in 0..points {
        let x = random_point(p.manifold(), seed.wrapping_mul(1000) + i);
        let y_k = random_feasible(&h, &mut rng, 2.0 * h.dual_radius().max(1.0));
        let lambda = rng.random_range(0.01..1.0);
        let beta = rng.random_range(0.0..2.0);
        let a = phi_k_grad(p, x.basis(), &y_k, lambda, beta);
        let b = phi_k_grad_moreau(p, x.basis(), &y_k, lambda, beta);
        worst = worst.max((a - b).norm() / (1.0 + p.f_grad(x.basis()).norm()));
    }
    worst
}

/// Largest difference between RADA-RGD and sGS-ADMM iterates over `iters`
/// iterations from the same start.
pub fn sgs_trajectory_gap<P: Problem>(p: &P, t: usize, iters: usize, x0: ManifoldPoint) -> rada_core::Result<f64> {
    let (rows, cols) = p.manifold().shape();
    let mut cfg = RadaConfig::new(1e-12, rows as f64 * (cols as f64).sqrt(), t, InnerSolver::RiemannianGradient);
    cfg.max_iters = iters;
    cfg.record_trajectory = true;
    let y0 = p.prox_family().origin_projection();
    let a = run_rada(p, &cfg, x0.clone(), y0.clone())?;
    let b = run_sgs_admm(p, &cfg, x0, y0)?;
    if a.trajectory.len() != b.trajectory.len() {
        return Ok(f64::INFINITY);
    }
    Ok(a.trajectory
        .iter()
        .zip(&b.trajectory)
        .map(|((xa, ya), (xb, yb))| (xa - xb).norm().max((ya - yb).norm()))
        .fold(0.0, f64::max))
}

fn adjoint_fd_worst<P: Problem>(p: &P, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = p.prox_family();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let x = random_point(p.manifold(), seed * 100 + i);
        let (rows, cols) = p.manifold().shape();
        let u = gaussian_mat(&mut rng, rows, cols);
        let y = Dual::from_fn(h.len(), |_, _| rng.random_range(-1.0..1.0));
        let e = 1e-6;
        let fd = (p.a_apply(&(x.basis() + &u * e)) - p.a_apply(&(x.basis() - &u * e))).dot(&y) / (2.0 * e);
        let an = frob_dot(&u, &p.a_adjoint(x.basis(), &y));
        let fdf = (p.f_value(&(x.basis() + &u * e)) - p.f_value(&(x.basis() - &u * e))) / (2.0 * e);
        let anf = frob_dot(&u, &p.f_grad(x.basis()));
        worst = worst
            .max((fd - an).abs() / an.abs().max(1.0))
            .max((fdf - anf).abs() / anf.abs().max(1.0));
    }
    worst
}

fn rotation_invariance_worst<P: Problem>(p: &P, seed: u64) -> f64 {
    let (_, cols) = p.manifold().shape();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let x = random_point(p.manifold(), seed * 100 + i);
        let o = random_point(rada_core::manifold::ManifoldDescriptor::stiefel(cols, cols).expect("square"), seed + i);
        let xo = x.basis() * o.basis();
        worst = worst
            .max((p.f_value(x.basis()) - p.f_value(&xo)).abs())
            .max((p.a_apply(x.basis()) - p.a_apply(&xo)).norm());
    }
    worst
}

fn manifold_worst<P: Problem>(p: &P, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feas = 0.0f64;
    let mut idem = 0.0f64;
    for i in 0..20 {
        let x = random_point(p.manifold(), seed * 100 + i);
        let (rows, cols) = p.manifold().shape();
        let g = gaussian_mat(&mut rng, rows, cols);
        let Ok(v) = tangent_project(&x, &g) else {
            return (f64::INFINITY, f64::INFINITY);
        };
        let Ok(vv) = tangent_project(&x, v.matrix()) else {
            return (f64::INFINITY, f64::INFINITY);
        };
        idem = idem.max((vv.matrix() - v.matrix()).norm());
        match retract(&x, &v.scaled(0.3)) {
            Ok(z) => feas = feas.max(orthonormality_residual(z.basis())),
            Err(_) => feas = f64::INFINITY,
        }
    }
    (feas, idem)
}

fn laplacian_worst(seed: u64) -> f64 {
    let pts = gen_gaussian_points(4, 15, seed).points;
    let w = affinity_inner_abs(&pts);
    let Ok(l) = build_laplacian(&w) else {
        return f64::INFINITY;
    };
    let (values, _) = sym_eigen_ascending(&l);
    let root = Dual::from_fn(15, |i, _| w.row(i).sum().sqrt());
    (&l - l.transpose())
        .norm()
        .max(-values[0])
        .max((&l * root).norm())
}

struct Runs {
    rgd_spca: rada_core::report::RunReport,
    rgd_fpca: rada_core::report::RunReport,
    pgd_ssc: rada_core::report::RunReport,
    baselines: Vec<rada_core::report::RunReport>,
}

fn runs() -> rada_core::Result<Runs> {
    let spca = small_spca();
    let fpca = small_fpca();
    let ssc = small_ssc();
    let mut rgd = RadaConfig::new(1e-10, 20.0 * 3f64.sqrt(), 4, InnerSolver::RiemannianGradient);
    rgd.diagnostics = true;
    rgd.max_iters = 200;
    let rgd_spca = run_rada(&spca, &rgd, random_point(spca.manifold(), 5), Dual::zeros(60))?;
    let mut cfg = RadaConfig::new(1e-10, 1e4 * 64.0 * 2f64.sqrt(), 5, InnerSolver::RiemannianGradient);
    cfg.diagnostics = true;
    cfg.max_iters = 50;
    let rgd_fpca = run_rada(&fpca, &cfg, random_point(fpca.manifold(), 6), fpca.prox_family().origin_projection())?;
    let mut pgd = RadaConfig::new(1e-10, 144.0 * 3f64.sqrt(), 1, InnerSolver::ProjectedGradient);
    pgd.pgd_step = PgdStep::InverseSmoothing;
    pgd.diagnostics = true;
    pgd.max_iters = 50;
    let x0 = spectral_init(ssc.laplacian(), 3)?;
    let pgd_ssc = run_rada(&ssc, &pgd, x0, Dual::zeros(144))?;
    let mut baselines = Vec::new();
    for b in [Baseline::Arpgda, Baseline::Dsgm, Baseline::Radmm] {
        let mut c = BaselineConfig::new(b, 1e-8);
        c.diagnostics = true;
        c.max_iters = 200;
        baselines.push(run_baseline(&fpca, &c, random_point(fpca.manifold(), 7), fpca.prox_family().origin_projection())?);
    }
    Ok(Runs {
        rgd_spca,
        rgd_fpca,
        pgd_ssc,
        baselines,
    })
}

/// Every suite, in a fixed order.
pub fn run_selftest() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |suite, name: String, value: f64, tol| out.push(Check { suite, name, value, tol });
    let spca = small_spca();
    let fpca = small_fpca();
    let ssc = small_ssc();

    push("oracles", "spca grad Phi_k vs FD".into(), phi_k_fd_worst(&spca, 20, 11), 1e-5);
    push("oracles", "fpca grad Phi_k vs FD".into(), phi_k_fd_worst(&fpca, 20, 12), 1e-5);
    push("oracles", "ssc grad Phi_k vs FD".into(), phi_k_fd_worst(&ssc, 20, 13), 1e-5);
    push("oracles", "spca adjoint and grad f vs FD".into(), adjoint_fd_worst(&spca, 14), 1e-5);
    push("oracles", "fpca adjoint and grad f vs FD".into(), adjoint_fd_worst(&fpca, 15), 1e-5);
    push("oracles", "ssc adjoint and grad f vs FD".into(), adjoint_fd_worst(&ssc, 16), 1e-5);
    push("oracles", "ssc rotation invariance".into(), rotation_invariance_worst(&ssc, 17), 1e-10);

    for (name, h) in [
        ("linf ball", ProxFamily::linf_ball(0.7, 9)),
        ("simplex", ProxFamily::simplex(6)),
    ] {
        let h = h.expect("valid family");
        let (dec, env) = moreau_identity_worst(&h, 100, 21);
        push("convex", format!("{name} Moreau decomposition"), dec, 1e-10);
        push("convex", format!("{name} envelope decomposition"), env, 1e-10);
    }
    push("convex", "spca gradient formulas agree".into(), gradient_formula_gap(&spca, 20, 22), 1e-12);
    push("convex", "fpca gradient formulas agree".into(), gradient_formula_gap(&fpca, 20, 23), 1e-12);
    push("convex", "ssc gradient formulas agree".into(), gradient_formula_gap(&ssc, 20, 24), 1e-12);

    for (name, (feas, idem)) in [
        ("stiefel", manifold_worst(&spca, 31)),
        ("grassmann", manifold_worst(&ssc, 32)),
    ] {
        push("manifold", format!("{name} retraction feasibility"), feas, FEASIBILITY_TOL);
        push("manifold", format!("{name} tangent projection idempotent"), idem, 1e-12);
    }
    push("problem", "laplacian symmetry, PSD, null vector".into(), laplacian_worst(41), 1e-10);

    let sgs = sgs_trajectory_gap(&spca, 1, 30, random_point(spca.manifold(), 51)).unwrap_or(f64::INFINITY);
    push("rada", "sgs-admm reproduces rada-rgd (T=1)".into(), sgs, 1e-8);
    let sgs = sgs_trajectory_gap(&spca, 3, 30, random_point(spca.manifold(), 52)).unwrap_or(f64::INFINITY);
    push("rada", "sgs-admm reproduces rada-rgd (T=3)".into(), sgs, 1e-8);

    match runs() {
        Ok(r) => {
            for (name, rep) in [("spca rgd", &r.rgd_spca), ("fpca rgd", &r.rgd_fpca), ("ssc pgd", &r.pgd_ssc)] {
                let d = rep.diagnostics;
                let scale = rep.phi.abs().max(1.0);
                push("rada", format!("{name} beta_k <= beta1/k^rho"), d.max_beta_excess, 0.0);
                push("rada", format!("{name} y_k feasible"), d.max_dual_infeasibility, 1e-12);
                push("rada", format!("{name} gradient identity"), d.gradient_identity_gap, 1e-12);
                push("rada", format!("{name} value routes"), d.value_route_gap, 1e-10);
                push("rada", format!("{name} delta routes"), d.delta_route_gap, 1e-10);
                push("rada", format!("{name} sufficient decrease"), d.max_decrease_excess, 1e-9 * scale);
                if name == "ssc pgd" {
                    push("rada", format!("{name} descent slack"), -d.min_descent_slack, 1e-10 * scale);
                } else {
                    push("rada", format!("{name} Armijo slack"), -d.min_armijo_slack, 1e-12);
                }
            }
            for rep in &r.baselines {
                let d = rep.diagnostics;
                push("baselines", format!("{} Armijo slack", rep.algorithm), -d.min_armijo_slack, 1e-12);
                push("baselines", format!("{} y feasible", rep.algorithm), d.max_dual_infeasibility, 1e-12);
                if rep.algorithm == "radmm" {
                    push("baselines", "radmm p-step residual".into(), d.max_p_step_residual, 1e-9);
                }
            }
        }
        Err(e) => push("rada", format!("solver runs failed: {e}"), f64::INFINITY, 0.0),
    }

    let mut worst_var = 0.0f64;
    let mut worst_nmi = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for s in 0..20 {
        let a = gen_gaussian_points(8, 5, 100 + s).points;
        let x = random_point(spca.manifold(), s);
        let xs = x.basis().rows(0, 8).clone_owned();
        let q = rada_core::linalg::qr_positive(&xs).unwrap_or(xs);
        worst_var = worst_var.max(normalized_variance(&a, &q, 3).map_or(f64::INFINITY, |v| v - 1.0));
        let la: Vec<usize> = (0..30).map(|_| rng.random_range(0..3)).collect();
        let lb: Vec<usize> = (0..30).map(|_| rng.random_range(0..4)).collect();
        worst_nmi = worst_nmi.max(nmi(&la, &lb).map_or(f64::INFINITY, |v| (v - 1.0).max(-v)));
    }
    push("metrics", "normalized variance <= 1".into(), worst_var, 1e-10);
    push("metrics", "nmi within [0, 1]".into(), worst_nmi, 1e-12);
    out
}
