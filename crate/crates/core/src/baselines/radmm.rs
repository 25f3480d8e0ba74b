use alloc::vec::Vec;

use crate::convex::{moreau_env_grad, prox_h, prox_of_moreau_env, Envelope, ProxFamily};
use crate::error::Result;
use crate::linalg::Dual;
use crate::manifold::ManifoldPoint;
use crate::problem::Problem;
use crate::rada::{backtrack, check_rgs, check_ros, riemannian_grad};
use crate::report::{Clock, Diagnostics, IterationRecord, NoClock, RunReport};

use super::{linear_change, or_stay, stop_window, BaselineConfig, BbMemory};

/// `argmin_p L̃_σ(x, p; y)` for `a = A(x)`: the prox of `M_{λh*}` at `a + y/σ`.
pub fn radmm_p_step(h: &ProxFamily, lambda: f64, sigma: f64, a: &Dual, y: &Dual) -> Dual {
    prox_of_moreau_env(h, lambda, sigma, &(a + y / sigma))
}

pub fn run_radmm<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
) -> Result<RunReport> {
    run_radmm_timed(p, cfg, x_init, y_init, &NoClock)
}

/// ADMM on `min f(x) + M_{λ_k h*}(p)` s.t. `A(x) = p`: one Riemannian
/// gradient step on `L̃_{σ_k}(·, p_k; y_k)`, the exact `p`-step, then
/// `y += σ_k (A(x) − p)`. Starts from `p_1 = A(x_1)`.
pub fn run_radmm_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
    clock: &dyn Clock,
) -> Result<RunReport> {
    cfg.validate()?;
    crate::rada::check_start(p, &x_init, &y_init)?;
    let h = p.prox_family();
    let lambda_cert = cfg.lambda_for(p.dual_radius())?;
    let ls = &cfg.line_search;
    let t0 = clock.elapsed_seconds();

    let mut x = x_init;
    let mut y = y_init;
    let mut a = p.a_apply(x.basis());
    let mut pv = a.clone();
    let mut bb = BbMemory::new(ls);
    let mut history = Vec::new();
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let mut diag = Diagnostics::default();
    let mut converged = false;
    let mut k = 1;

    loop {
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

        let lambda_k = cfg.smoothing.at(k);
        let sigma = cfg.sigma.at(k);
        // x-part of L̃_σ(x, p_k; y_k): f + ⟨y, A⟩ + (σ/2)‖A − p‖².
        let g = riemannian_grad(p, &x, &(&y + (&a - &pv) * sigma))?;
        let merit = p.f_value(x.basis()) + a.dot(&y) + 0.5 * sigma * (&a - &pv).norm_squared();
        let searched = backtrack(ls, &x, merit, &g, bb.zeta, 0.0, |z| {
            let az = p.a_apply(z.basis());
            let mut penalty = 0.0;
            for i in 0..az.len() {
                penalty += (az[i] - a[i]) * (az[i] + a[i] - 2.0 * pv[i]);
            }
            let change = p.f_change(z.basis(), x.basis()) + linear_change(&az, &a, &y) + 0.5 * sigma * penalty;
            (merit + change, change, az)
        });
        let acc = or_stay(searched, &x, merit, || a.clone(), &mut diag.null_steps)?;
        let a_next = acc.extra;
        if acc.step > 0.0 {
            let g_same = riemannian_grad(p, &acc.x, &(&y + (&a_next - &pv) * sigma))?;
            bb.update(ls, x.basis(), g.matrix(), acc.x.basis(), g_same.matrix());
        }
        let p_next = radmm_p_step(&h, lambda_k, sigma, &a_next, &y);
        if cfg.diagnostics {
            diag.min_armijo_slack = diag.min_armijo_slack.min(acc.slack);
            let grad_m = moreau_env_grad(&h, Envelope::Conjugate, &p_next, lambda_k)?;
            let residual = (grad_m - &y + (&p_next - &a_next) * sigma).norm();
            diag.max_p_step_residual = diag.max_p_step_residual.max(residual);
        }
        y += (&a_next - &p_next) * sigma;
        if cfg.diagnostics {
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
        a = a_next;
        pv = p_next;
        k += 1;
    }

    // y_{k+1} = ∇M_{λ_k h*}(p_{k+1}) lies in dom h up to rounding; the
    // projection makes it a valid certificate probe.
    let probe = prox_h(&h, &y, 1.0);
    let rgs = check_rgs(p, &x, &probe, cfg.gamma, cfg.eps)?;
    let ros = check_ros(p, &x, lambda_cert, cfg.eps)?;
    Ok(RunReport {
        algorithm: "radmm",
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
