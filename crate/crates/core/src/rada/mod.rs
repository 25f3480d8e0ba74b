//! Riemannian alternating descent ascent with projected-gradient and
//! Riemannian-gradient inner solvers.

mod certificate;
mod inner;
mod linesearch;
mod value;

pub use certificate::{check_rgs, check_ros};
pub use inner::{inner_pgd, inner_rgd, pgd_ell, InnerOutcome, StepMemory, Subproblem};
pub use linesearch::{backtrack, bb_raw, bb_safeguarded, Accepted, LineSearchConfig};
pub use value::{
    beta_update, delta_primal_residual, delta_residual, evaluate, f_k_value, phi_k_grad, phi_k_grad_moreau,
    phi_k_change, phi_k_moreau, phi_k_value, riemannian_grad, y_half, y_half_from, y_update, y_update_moreau, Evaluation,
};

pub(crate) use certificate::dual_residual;
pub(crate) use value::phi_k_scale;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Dual};
use crate::manifold::{tangent_project, ManifoldPoint};
use crate::problem::Problem;
use crate::report::{Clock, Diagnostics, IterationRecord, NoClock, RgsCertificate, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    ProjectedGradient,
    RiemannianGradient,
}

/// Stepsize rule of the projected-gradient solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgdStep {
    /// `ℓ_k = L_f + R L_A¹ + ρ_A L_A⁰/(λ+β_k)`.
    Lipschitz,
    /// `ℓ_k = 1/(λ+β_k)`, valid when `f` and `A` are linear in the variable
    /// the step is taken on (the projector for SSC).
    InverseSmoothing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadaConfig {
    pub eps: f64,
    /// Defaults to `ε/(2R)`.
    pub lambda: Option<f64>,
    pub beta1: f64,
    pub rho: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub inner_steps: usize,
    pub inner: InnerSolver,
    pub pgd_step: PgdStep,
    pub line_search: LineSearchConfig,
    pub gamma: f64,
    pub max_iters: usize,
    pub log_every: usize,
    pub diagnostics: bool,
    pub record_trajectory: bool,
}

impl RadaConfig {
    pub fn new(eps: f64, beta1: f64, inner_steps: usize, inner: InnerSolver) -> Self {
        RadaConfig {
            eps,
            lambda: None,
            beta1,
            rho: 1.5,
            tau1: 0.999,
            tau2: 0.9,
            inner_steps,
            inner,
            pgd_step: PgdStep::Lipschitz,
            line_search: LineSearchConfig::default(),
            gamma: 1.0,
            max_iters: 20_000,
            log_every: 1,
            diagnostics: false,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.eps > 0.0) {
            return bad("eps", "must be positive");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad("lambda", "must be positive and finite");
            }
        }
        if !(self.beta1 >= 0.0 && self.beta1.is_finite()) {
            return bad("beta1", "must be nonnegative and finite");
        }
        if !(self.rho > 1.0) {
            return bad("rho", "must exceed 1");
        }
        if !(self.tau1 > 0.0 && self.tau1 < 1.0) {
            return bad("tau1", "must lie in (0, 1)");
        }
        if !(self.tau2 > 0.0 && self.tau2 < 1.0) {
            return bad("tau2", "must lie in (0, 1)");
        }
        if self.inner_steps == 0 {
            return bad("T", "must be at least 1");
        }
        if !(self.gamma > 0.0) {
            return bad("gamma", "must be positive");
        }
        if self.log_every == 0 {
            return bad("log_every", "must be at least 1");
        }
        self.line_search.validate()
    }

    /// `λ` for a dual domain of radius `r`.
    pub fn lambda_for(&self, r: f64) -> Result<f64> {
        match self.lambda {
            Some(l) => Ok(l),
            None if r > 0.0 => Ok(self.eps / (2.0 * r)),
            None => Err(Error::InvalidParameter {
                name: "lambda",
                reason: "zero dual radius needs an explicit value",
            }),
        }
    }

    /// Line-search allowance `ν_k = 2 T R² β_k`.
    pub fn nu(&self, r: f64, beta: f64) -> f64 {
        2.0 * self.inner_steps as f64 * r * r * beta
    }

    pub fn algorithm_name(&self) -> &'static str {
        match self.inner {
            InnerSolver::ProjectedGradient => "rada-pgd",
            InnerSolver::RiemannianGradient => "rada-rgd",
        }
    }
}

pub(crate) fn check_start<P: Problem + ?Sized>(p: &P, x: &ManifoldPoint, y: &Dual) -> Result<()> {
    if x.descriptor() != p.manifold() {
        return Err(Error::ShapeMismatch {
            expected: p.manifold().shape(),
            found: x.basis().shape(),
        });
    }
    let h = p.prox_family();
    if y.len() != h.len() {
        return Err(Error::ShapeMismatch {
            expected: (h.len(), 1),
            found: (y.len(), 1),
        });
    }
    let residual = h.feasibility_residual(y);
    if !(residual <= 1e-12) {
        return Err(Error::Infeasible { residual });
    }
    Ok(())
}

/// `max(1, ‖A(x) + β y_k‖_∞/(λ+β))`: rounding in `v − prox_{th*}(v)` is
/// amplified by this factor when the envelope gradient divides by `t`.
pub fn envelope_conditioning(a: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> f64 {
    (inf_norm((a + y_k * beta).as_slice()) / (lambda + beta)).max(1.0)
}

pub fn run_rada<P: Problem + ?Sized>(p: &P, cfg: &RadaConfig, x: ManifoldPoint, y: Dual) -> Result<RunReport> {
    run_rada_timed(p, cfg, x, y, &NoClock)
}

pub fn run_rada_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &RadaConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
    clock: &dyn Clock,
) -> Result<RunReport> {
    cfg.validate()?;
    check_start(p, &x_init, &y_init)?;
    let h = p.prox_family();
    let r = p.dual_radius();
    let lambda = cfg.lambda_for(r)?;
    let t0 = clock.elapsed_seconds();

    let mut x = x_init;
    let mut y = y_init;
    let mut beta = cfg.beta1;
    let mut beta1_running = cfg.beta1;
    // β_0 = β_1 and y_0 = y_1 make δ_1 = λ‖y_1‖_∞.
    let mut delta = lambda * inf_norm(y.as_slice());
    let mut memory = StepMemory {
        zeta: cfg.line_search.zeta_init,
    };
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let mut diag = Diagnostics::default();
    // (Φ_k(x_k), ν_k, β_k) of the previous iteration.
    let mut previous: Option<(f64, f64, f64)> = None;
    let mut converged = false;
    let mut rgs: RgsCertificate;
    let mut k = 1;

    loop {
        if cfg.record_trajectory {
            trajectory.push((x.basis().clone(), y.clone()));
        }
        let ev = evaluate(p, x.basis(), &y, lambda, beta);
        let g = riemannian_grad(p, &x, &ev.y_half)?;
        let g_norm = g.norm();
        let y_res = dual_residual(p, &ev.a, &ev.y_half, cfg.gamma);
        rgs = RgsCertificate {
            pass: g_norm.max(y_res) <= cfg.eps,
            g_res: g_norm,
            y_res,
        };

        if cfg.diagnostics {
            let moreau = phi_k_moreau(&h, ev.f, &ev.a, &y, lambda, beta);
            diag.value_route_gap = diag
                .value_route_gap
                .max((moreau - ev.value).abs() / phi_k_scale(&ev, &y, beta));
            // Both gradients share ∇f, so their difference is proj(∇Aᵀ(w − y_half)).
            let w = y_update_moreau(&h, &ev.a, &y, lambda, beta);
            let gap = tangent_project(&x, &p.a_adjoint(x.basis(), &(w - &ev.y_half)))?.norm();
            diag.gradient_identity_gap = diag
                .gradient_identity_gap
                .max(gap / envelope_conditioning(&ev.a, &y, lambda, beta));
            diag.max_beta_excess = diag
                .max_beta_excess
                .max(beta - cfg.beta1 / libm::pow(k as f64, cfg.rho));
            diag.max_dual_infeasibility = diag.max_dual_infeasibility.max(h.feasibility_residual(&y));
            if let Some((phi_prev, nu_prev, beta_prev)) = previous {
                let excess = ev.value - phi_prev - nu_prev - 2.0 * beta_prev * r * r;
                diag.max_decrease_excess = diag.max_decrease_excess.max(excess);
            }
        }

        if rgs.pass {
            converged = true;
            break;
        }
        if k > cfg.max_iters {
            break;
        }

        let merit = ev.value;
        let sub = Subproblem {
            y_k: &y,
            lambda,
            beta,
        };
        let (out, nu) = match cfg.inner {
            InnerSolver::ProjectedGradient => (
                inner_pgd(p, sub, x.clone(), ev, cfg.inner_steps, cfg.pgd_step)?,
                0.0,
            ),
            InnerSolver::RiemannianGradient => {
                let nu = cfg.nu(r, beta);
                let allowance = nu / cfg.inner_steps as f64;
                let out = inner_rgd(
                    p,
                    sub,
                    x.clone(),
                    ev,
                    g,
                    cfg.inner_steps,
                    allowance,
                    &cfg.line_search,
                    &mut memory,
                )?;
                (out, nu)
            }
        };

        diag.null_steps += usize::from(out.null_step);

        // The dual step is the maximizer of F_k at the new point.
        let y_next = out.eval.y_half.clone();
        let delta_next = delta_residual(&y_next, &y, lambda, beta);
        if cfg.diagnostics {
            let primal = delta_primal_residual(&h, &out.eval.a, &y, lambda, beta);
            diag.delta_route_gap = diag.delta_route_gap.max((primal - delta_next).abs());
            match cfg.inner {
                InnerSolver::ProjectedGradient => diag.min_descent_slack = diag.min_descent_slack.min(out.min_slack),
                InnerSolver::RiemannianGradient => diag.min_armijo_slack = diag.min_armijo_slack.min(out.min_slack),
            }
        }
        if (k - 1) % cfg.log_every == 0 {
            records.push(IterationRecord {
                k,
                phi: p.phi_value(x.basis()),
                merit,
                grad_norm: g_norm,
                delta: Some(delta),
                beta: Some(beta),
                nu,
                inner_steps: out.steps,
                backtracks: out.backtracks,
                elapsed: clock.elapsed_seconds() - t0,
            });
        }

        previous = Some((merit, nu, beta));
        let (beta_next, running) = beta_update(beta1_running, delta, delta_next, k + 1, cfg.tau1, cfg.tau2, cfg.rho);
        beta = beta_next;
        beta1_running = running;
        delta = delta_next;
        x = out.x;
        y = y_next;
        k += 1;
    }

    let ros = check_ros(p, &x, lambda, cfg.eps)?;
    if cfg.diagnostics {
        diag.max_dual_infeasibility = diag.max_dual_infeasibility.max(h.feasibility_residual(&y));
    }
    Ok(RunReport {
        algorithm: cfg.algorithm_name(),
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
