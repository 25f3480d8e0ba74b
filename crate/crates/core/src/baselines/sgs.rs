use alloc::vec::Vec;

use crate::convex::{moreau_env_value, prox_of_moreau_env, Envelope, ProxFamily};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Dual, Mat};
use crate::manifold::ManifoldPoint;
use crate::problem::Problem;
use crate::rada::{backtrack, bb_safeguarded, beta_update, check_ros, delta_residual, dual_residual, riemannian_grad, RadaConfig};
use crate::report::{Clock, Diagnostics, IterationRecord, NoClock, RgsCertificate, RunReport};

/// `p(x) = argmin_p L̃_{1/β}(x, p; y)` for `a = A(x)`.
pub fn sgs_p_step(h: &ProxFamily, lambda: f64, beta: f64, a: &Dual, y: &Dual) -> Dual {
    prox_of_moreau_env(h, lambda, 1.0 / beta, &(a + y * beta))
}

/// `L̃_{1/β}(x, p(x); y)` together with the pieces the iteration reuses.
#[derive(Debug, Clone)]
struct Split {
    a: Dual,
    p: Dual,
    /// `y + (A(x) − p(x))/β`, the multiplier after a dual step at `x`.
    multiplier: Dual,
    value: f64,
}

fn split<P: Problem + ?Sized>(p: &P, x: &Mat, y: &Dual, lambda: f64, beta: f64) -> Split {
    let h = p.prox_family();
    let a = p.a_apply(x);
    let pv = sgs_p_step(&h, lambda, beta, &a, y);
    let r = &a - &pv;
    let value = p.f_value(x) + moreau_env_value(&h, Envelope::Conjugate, &pv, lambda) + y.dot(&r) + r.norm_squared() / (2.0 * beta);
    let multiplier = y + &r / beta;
    Split {
        a,
        p: pv,
        multiplier,
        value,
    }
}

pub fn run_sgs_admm<P: Problem + ?Sized>(p: &P, cfg: &RadaConfig, x_init: ManifoldPoint, y_init: Dual) -> Result<RunReport> {
    run_sgs_admm_timed(p, cfg, x_init, y_init, &NoClock)
}

/// Riemannian sGS-ADMM (`p → x → p` ordering) with penalty `1/β_k`, the β
/// schedule of RADA, and the same BB-initialized backtracking, applied to
/// `x ↦ L̃_{1/β_k}(x, p(x); y_k)`. The `inner` field of the config is not
/// used: every x-update is `inner_steps` Riemannian gradient steps, and
/// `inner_steps = 1` is the sGS-ADMM proper.
pub fn run_sgs_admm_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &RadaConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
    clock: &dyn Clock,
) -> Result<RunReport> {
    cfg.validate()?;
    crate::rada::check_start(p, &x_init, &y_init)?;
    let h = p.prox_family();
    let r = p.dual_radius();
    let lambda = cfg.lambda_for(r)?;
    let ls = &cfg.line_search;
    let t0 = clock.elapsed_seconds();

    let mut x = x_init;
    let mut y = y_init;
    let mut beta = cfg.beta1;
    let mut beta1_running = cfg.beta1;
    let mut delta = lambda * inf_norm(y.as_slice());
    let mut zeta = ls.zeta_init;
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let mut diag = Diagnostics::default();
    let mut converged = false;
    let mut rgs: RgsCertificate;
    let mut k = 1;

    loop {
        if cfg.record_trajectory {
            trajectory.push((x.basis().clone(), y.clone()));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: "sGS-ADMM needs a finite penalty 1/beta_k",
            });
        }
        let start = split(p, x.basis(), &y, lambda, beta);
        let g = riemannian_grad(p, &x, &start.multiplier)?;
        let g_norm = g.norm();
        let y_res = dual_residual(p, &start.a, &start.multiplier, cfg.gamma);
        rgs = RgsCertificate {
            pass: g_norm.max(y_res) <= cfg.eps,
            g_res: g_norm,
            y_res,
        };
        if cfg.diagnostics {
            diag.max_dual_infeasibility = diag.max_dual_infeasibility.max(h.feasibility_residual(&y));
        }
        if rgs.pass {
            converged = true;
            break;
        }
        if k > cfg.max_iters {
            break;
        }

        let nu = cfg.nu(r, beta);
        let allowance = nu / cfg.inner_steps as f64;
        let merit = start.value;
        let mut xt = x.clone();
        let mut cur = start;
        let mut gt = g;
        let mut backtracks = 0;
        for t in 1..=cfg.inner_steps {
            let base = cur.value;
            let searched = backtrack(ls, &xt, base, &gt, zeta, allowance, |z| {
                let s = split(p, z.basis(), &y, lambda, beta);
                (s.value, s.value - base, s)
            });
            // Same null step as the RADA-RGD inner loop.
            let acc = match searched {
                Err(Error::LineSearchFailure { .. }) => {
                    diag.null_steps += 1;
                    break;
                }
                other => other?,
            };
            backtracks += acc.backtracks;
            if cfg.diagnostics {
                diag.min_armijo_slack = diag.min_armijo_slack.min(acc.slack);
            }
            let g_next = riemannian_grad(p, &acc.x, &acc.extra.multiplier)?;
            zeta = bb_safeguarded(ls, t, &(acc.x.basis() - xt.basis()), &(g_next.matrix() - gt.matrix()), g_next.norm());
            xt = acc.x;
            cur = acc.extra;
            gt = g_next;
        }

        // p_{k+1} = p(x_{k+1}) is `cur.p`; the dual step uses it directly.
        let y_next = &y + (&cur.a - &cur.p) / beta;
        let delta_next = delta_residual(&y_next, &y, lambda, beta);
        if (k - 1) % cfg.log_every == 0 {
            records.push(IterationRecord {
                k,
                phi: p.phi_value(x.basis()),
                merit,
                grad_norm: g_norm,
                delta: Some(delta),
                beta: Some(beta),
                nu,
                inner_steps: cfg.inner_steps,
                backtracks,
                elapsed: clock.elapsed_seconds() - t0,
            });
        }
        let (beta_next, running) = beta_update(beta1_running, delta, delta_next, k + 1, cfg.tau1, cfg.tau2, cfg.rho);
        beta = beta_next;
        beta1_running = running;
        delta = delta_next;
        x = xt;
        y = y_next;
        k += 1;
    }

    let ros = check_ros(p, &x, lambda, cfg.eps)?;
    Ok(RunReport {
        algorithm: "sgs-admm",
        records,
        converged,
        iterations: k - 1,
        elapsed: clock.elapsed_seconds() - t0,
        rgs,
        ros,
        phi: p.phi_value(x.basis()),
        x,
        y,
        diagnostics: diag,
        trajectory,
    })
}
