use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::{Dual, Mat};
use crate::manifold::ManifoldPoint;
use crate::problem::Problem;
use crate::rada::{backtrack, check_rgs, check_ros, evaluate, phi_k_change, riemannian_grad, Evaluation};
use crate::report::{Clock, Diagnostics, IterationRecord, NoClock, RunReport};

use super::{or_stay, stop_window, BaselineConfig, BbMemory};

/// `f(x) + M_{λh*}(A(x))` with its maximizer `prox_{h/λ}(A(x)/λ)`: the value
/// function with `β = 0`.
pub fn dsgm_objective<P: Problem + ?Sized>(p: &P, x: &Mat, lambda: f64) -> Evaluation {
    let unused = Dual::zeros(p.prox_family().len());
    evaluate(p, x, &unused, lambda, 0.0)
}

/// Euclidean gradient of the smoothed objective, `∇f + ∇Aᵀ prox_{h/λ}(A/λ)`.
pub fn smoothed_grad<P: Problem + ?Sized>(p: &P, x: &Mat, lambda: f64) -> Mat {
    let ev = dsgm_objective(p, x, lambda);
    p.f_grad(x) + p.a_adjoint(x, &ev.y_half)
}

pub fn run_dsgm<P: Problem + ?Sized>(p: &P, cfg: &BaselineConfig, x_init: ManifoldPoint) -> Result<RunReport> {
    run_dsgm_timed(p, cfg, x_init, &NoClock)
}

/// One Riemannian gradient step per iteration on `f + M_{λ_k h*}(A(·))`
/// with `λ_k` from the smoothing schedule.
pub fn run_dsgm_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    clock: &dyn Clock,
) -> Result<RunReport> {
    cfg.validate()?;
    let h = p.prox_family();
    let unused = Dual::zeros(h.len());
    crate::rada::check_start(p, &x_init, &h.origin_projection())?;
    let lambda_cert = cfg.lambda_for(p.dual_radius())?;
    let ls = &cfg.line_search;
    let t0 = clock.elapsed_seconds();

    let mut x = x_init;
    let mut bb = BbMemory::new(ls);
    let mut history = Vec::new();
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let mut diag = Diagnostics::default();
    let mut converged = false;
    let mut y: Dual;
    let mut k = 1;

    loop {
        let lambda_k = cfg.smoothing.at(k);
        let ev = evaluate(p, x.basis(), &unused, lambda_k, 0.0);
        y = ev.y_half.clone();
        if cfg.record_trajectory {
            trajectory.push((x.basis().clone(), y.clone()));
        }
        let phi = p.phi_value(x.basis());
        history.push(phi);
        if stop_window(&history, cfg.phi_tol, cfg.window) {
            converged = true;
            break;
        }
        if k > cfg.max_iters {
            break;
        }

        let g = riemannian_grad(p, &x, &ev.y_half)?;
        let merit = ev.value;
        let searched = backtrack(ls, &x, merit, &g, bb.zeta, 0.0, |z| {
            let e = evaluate(p, z.basis(), &unused, lambda_k, 0.0);
            let change = phi_k_change(p, z.basis(), &e, x.basis(), &ev, &unused, lambda_k, 0.0);
            (e.value, change, e)
        });
        let acc = or_stay(searched, &x, merit, || ev.clone(), &mut diag.null_steps)?;
        if acc.step > 0.0 {
            let g_same = riemannian_grad(p, &acc.x, &acc.extra.y_half)?;
            bb.update(ls, x.basis(), g.matrix(), acc.x.basis(), g_same.matrix());
        }
        if cfg.diagnostics {
            diag.min_armijo_slack = diag.min_armijo_slack.min(acc.slack);
            diag.max_dual_infeasibility = diag.max_dual_infeasibility.max(h.feasibility_residual(&y));
        }
        if (k - 1) % cfg.log_every == 0 {
            records.push(IterationRecord {
                k,
                phi,
                merit,
                grad_norm: g.norm(),
                delta: None,
                beta: None,
                nu: 0.0,
                inner_steps: 1,
                backtracks: acc.backtracks,
                elapsed: clock.elapsed_seconds() - t0,
            });
        }
        x = acc.x;
        k += 1;
    }

    let rgs = check_rgs(p, &x, &y, cfg.gamma, cfg.eps)?;
    let ros = check_ros(p, &x, lambda_cert, cfg.eps)?;
    Ok(RunReport {
        algorithm: "dsgm",
        records,
        converged,
        iterations: k - 1,
        elapsed: clock.elapsed_seconds() - t0,
        rgs,
        ros,
        phi: *history.last().unwrap_or(&f64::NAN),
        x,
        y,
        diagnostics: diag,
        trajectory,
    })
}
