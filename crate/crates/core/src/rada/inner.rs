use crate::error::{Error, Result};
use crate::linalg::{Dual, Mat};
use crate::manifold::{project_to_manifold, ManifoldPoint, TangentVector};
use crate::problem::Problem;

use super::linesearch::{backtrack, bb_safeguarded, LineSearchConfig};
use super::value::{evaluate, phi_k_change, riemannian_grad, Evaluation};
use super::PgdStep;

/// Frozen data defining `Φ_k` for one outer iteration.
#[derive(Debug, Clone, Copy)]
pub struct Subproblem<'a> {
    pub y_k: &'a Dual,
    pub lambda: f64,
    pub beta: f64,
}

/// Result of an inner solve: the new point and `Φ_k` data at it.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub x: ManifoldPoint,
    pub eval: Evaluation,
    pub steps: usize,
    pub backtracks: usize,
    /// Min of `rhs − lhs` over accepted Armijo steps (RGD) or of the
    /// per-step decrease (PGD).
    pub min_slack: f64,
    /// The last line search could not certify any decrease, so the
    /// remaining steps were skipped.
    pub null_step: bool,
}

/// Constant `ℓ_k` of the projected-gradient solver.
pub fn pgd_ell<P: Problem + ?Sized>(p: &P, rule: PgdStep, lambda: f64, beta: f64) -> Result<f64> {
    match rule {
        PgdStep::InverseSmoothing => Ok(1.0 / (lambda + beta)),
        PgdStep::Lipschitz => {
            let l = p
                .lipschitz()
                .ok_or(Error::Unsupported("projected gradient needs Lipschitz constants"))?;
            Ok(l.grad_f + p.dual_radius() * l.jacobian + l.jacobian_bound * l.map / (lambda + beta))
        }
    }
}

/// `T` steps of `x ← proj_M(x − ∇Φ_k(x)/ℓ_k)`.
///
/// On Grassmann the step is taken on the projector `Q = XXᵀ`, using the
/// problem's projector gradient, and projected back by the leading
/// eigenvectors.
pub fn inner_pgd<P: Problem + ?Sized>(
    p: &P,
    sub: Subproblem<'_>,
    x0: ManifoldPoint,
    eval0: Evaluation,
    steps: usize,
    rule: PgdStep,
) -> Result<InnerOutcome> {
    let ell = pgd_ell(p, rule, sub.lambda, sub.beta)?;
    let desc = p.manifold();
    let mut x = x0;
    let mut ev = eval0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..steps {
        let b = x.basis();
        let target = if desc.is_grassmann() {
            let q = x.projector();
            let gq = p
                .projector_gradient(&q, &ev.y_half)
                .ok_or(Error::Unsupported("Grassmann projected gradient needs a projector gradient"))?;
            q - gq / ell
        } else {
            let g = p.f_grad(b) + p.a_adjoint(b, &ev.y_half);
            b - g / ell
        };
        let next = project_to_manifold(desc, &target)?;
        let next_ev = evaluate(p, next.basis(), sub.y_k, sub.lambda, sub.beta);
        let decrease = ev.value - next_ev.value;
        if decrease < -1e-10 * ev.value.abs().max(1.0) {
            return Err(Error::DescentViolation { increase: -decrease });
        }
        min_slack = min_slack.min(decrease);
        x = next;
        ev = next_ev;
    }
    Ok(InnerOutcome {
        x,
        eval: ev,
        steps,
        backtracks: 0,
        min_slack,
        null_step: false,
    })
}

/// Stepsize memory of the Riemannian gradient solver, carried across outer
/// iterations.
#[derive(Debug, Clone, Copy)]
pub struct StepMemory {
    pub zeta: f64,
}

/// `T` Riemannian gradient steps with BB-initialized backtracking on `Φ_k`,
/// allowing an increase of `allowance` per step.
#[allow(clippy::too_many_arguments)]
pub fn inner_rgd<P: Problem + ?Sized>(
    p: &P,
    sub: Subproblem<'_>,
    x0: ManifoldPoint,
    eval0: Evaluation,
    g0: TangentVector,
    steps: usize,
    allowance: f64,
    ls: &LineSearchConfig,
    memory: &mut StepMemory,
) -> Result<InnerOutcome> {
    let mut x = x0;
    let mut ev = eval0;
    let mut g = g0;
    let mut backtracks = 0;
    let mut min_slack = f64::INFINITY;
    let mut taken = 0;
    let mut null_step = false;
    for t in 1..=steps {
        let searched = backtrack(ls, &x, ev.value, &g, memory.zeta, allowance, |z| {
            let e = evaluate(p, z.basis(), sub.y_k, sub.lambda, sub.beta);
            let change = phi_k_change(p, z.basis(), &e, x.basis(), &ev, sub.y_k, sub.lambda, sub.beta);
            (e.value, change, e)
        });
        // Staying at x_t keeps Φ_k(x_{k+1}) ≤ Φ_k(x_k) + ν_k.
        let acc = match searched {
            Err(Error::LineSearchFailure { .. }) => {
                null_step = true;
                break;
            }
            other => other?,
        };
        taken = t;
        backtracks += acc.backtracks;
        min_slack = min_slack.min(acc.slack);
        let g_next = riemannian_grad(p, &acc.x, &acc.extra.y_half)?;
        let s: Mat = acc.x.basis() - x.basis();
        let v: Mat = g_next.matrix() - g.matrix();
        memory.zeta = bb_safeguarded(ls, t, &s, &v, g_next.norm());
        x = acc.x;
        ev = acc.extra;
        g = g_next;
    }
    Ok(InnerOutcome {
        x,
        eval: ev,
        steps: taken,
        backtracks,
        min_slack,
        null_step,
    })
}
