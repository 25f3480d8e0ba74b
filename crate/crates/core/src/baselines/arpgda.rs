use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::Dual;
use crate::manifold::{tangent_project, ManifoldPoint};
use crate::problem::Problem;
use crate::rada::{backtrack, check_rgs, check_ros, envelope_conditioning, riemannian_grad, y_half_from, y_update_moreau};
use crate::report::{Clock, Diagnostics, IterationRecord, NoClock, RunReport};

use super::{linear_change, or_stay, stop_window, BaselineConfig, BbMemory};

pub fn run_arpgda<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
) -> Result<RunReport> {
    run_arpgda_timed(p, cfg, x_init, y_init, &NoClock)
}

/// `x_{k+1} = R(−ζ grad_x F(x_k, y_k))` with backtracking on
/// `x ↦ F(x, y_k) − (λ/2)‖y_k‖²`, then the proximal dual step with `β_k`.
pub fn run_arpgda_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
    clock: &dyn Clock,
) -> Result<RunReport> {
    cfg.validate()?;
    crate::rada::check_start(p, &x_init, &y_init)?;
    let h = p.prox_family();
    let lambda = cfg.lambda_for(p.dual_radius())?;
    let ls = &cfg.line_search;
    let t0 = clock.elapsed_seconds();

    let mut x = x_init;
    let mut y = y_init;
    let mut a = p.a_apply(x.basis());
    let mut bb = BbMemory::new(ls);
    let mut history = Vec::new();
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let mut diag = Diagnostics::default();
    // (y_{k−1}, β_{k−1}): y_k maximizes F_{k−1}(x_k, ·).
    let mut previous: Option<(Dual, f64)> = None;
    let mut converged = false;
    let mut k = 1;

    loop {
        if cfg.record_trajectory {
            trajectory.push((x.basis().clone(), y.clone()));
        }
        let phi = p.phi_value(x.basis());
        history.push(phi);
        let g = riemannian_grad(p, &x, &y)?;
        if cfg.diagnostics {
            diag.max_dual_infeasibility = diag.max_dual_infeasibility.max(h.feasibility_residual(&y));
            if let Some((y_prev, beta_prev)) = &previous {
                // grad_x F(x_k, y_k) against grad Φ_{k−1}(x_k) by the envelope route.
                let w = y_update_moreau(&h, &a, y_prev, lambda, *beta_prev);
                let gap = tangent_project(&x, &p.a_adjoint(x.basis(), &(w - &y)))?.norm();
                diag.gradient_identity_gap = diag
                    .gradient_identity_gap
                    .max(gap / envelope_conditioning(&a, y_prev, lambda, *beta_prev));
            }
        }
        if stop_window(&history, cfg.phi_tol, cfg.window) {
            converged = true;
            break;
        }
        if k > cfg.max_iters {
            break;
        }

        let beta = cfg.beta.at(k);
        let merit = p.f_value(x.basis()) + a.dot(&y) - 0.5 * lambda * y.norm_squared();
        let searched = backtrack(ls, &x, merit, &g, bb.zeta, 0.0, |z| {
            let az = p.a_apply(z.basis());
            let change = p.f_change(z.basis(), x.basis()) + linear_change(&az, &a, &y);
            (merit + change, change, az)
        });
        let acc = or_stay(searched, &x, merit, || a.clone(), &mut diag.null_steps)?;
        if cfg.diagnostics {
            diag.min_armijo_slack = diag.min_armijo_slack.min(acc.slack);
        }
        if acc.step > 0.0 {
            let g_same = riemannian_grad(p, &acc.x, &y)?;
            bb.update(ls, x.basis(), g.matrix(), acc.x.basis(), g_same.matrix());
        }
        let y_next = y_half_from(&h, &acc.extra, &y, lambda, beta);
        if (k - 1) % cfg.log_every == 0 {
            records.push(IterationRecord {
                k,
                phi,
                merit,
                grad_norm: g.norm(),
                delta: None,
                beta: Some(beta),
                nu: 0.0,
                inner_steps: 1,
                backtracks: acc.backtracks,
                elapsed: clock.elapsed_seconds() - t0,
            });
        }
        previous = Some((core::mem::replace(&mut y, y_next), beta));
        x = acc.x;
        a = acc.extra;
        k += 1;
    }

    let rgs = check_rgs(p, &x, &y, cfg.gamma, cfg.eps)?;
    let ros = check_ros(p, &x, lambda, cfg.eps)?;
    Ok(RunReport {
        algorithm: "arpgda",
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
