use crate::convex::{moreau_env_value, prox_h, prox_h_conj, Envelope, ProxFamily};
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, Dual, Mat};
use crate::manifold::{tangent_project, ManifoldPoint, TangentVector};
use crate::problem::Problem;

/// `prox_{h/(λ+β)}((a + β y_k)/(λ+β))`, the maximizer of `F_k(x, ·)` given `a = A(x)`.
pub fn y_half_from(h: &ProxFamily, a: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> Dual {
    let t = lambda + beta;
    prox_h(h, &((a + y_k * beta) / t), 1.0 / t)
}

/// Maximizer of `F_k(x, y) = F(x, y) − (λ/2)‖y‖² − (β/2)‖y − y_k‖²` over `y`.
pub fn y_half<P: Problem + ?Sized>(p: &P, x: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Dual {
    y_half_from(&p.prox_family(), &p.a_apply(x), y_k, lambda, beta)
}

/// Dual step after the primal update; same map as [`y_half`] evaluated at `x_next`.
pub fn y_update<P: Problem + ?Sized>(p: &P, x_next: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Dual {
    y_half(p, x_next, y_k, lambda, beta)
}

/// Dual step through the Moreau decomposition:
/// `(β y_k + a − prox_{(λ+β)h*}(a + β y_k)) / (λ+β)`.
pub fn y_update_moreau(h: &ProxFamily, a: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> Dual {
    let t = lambda + beta;
    let v = a + y_k * beta;
    (&v - prox_h_conj(h, &v, t)) / t
}

/// `F_k(x, y)` given `f(x)` and `a = A(x)`.
pub fn f_k_value(f: f64, a: &Dual, y: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> f64 {
    f + a.dot(y) - 0.5 * lambda * y.norm_squared() - 0.5 * beta * (y - y_k).norm_squared()
}

/// `f + M_{(λ+β)h*}(a + β y_k) − (β/2)‖y_k‖²`.
pub fn phi_k_moreau(h: &ProxFamily, f: f64, a: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> f64 {
    let v = a + y_k * beta;
    f + moreau_env_value(h, Envelope::Conjugate, &v, lambda + beta) - 0.5 * beta * y_k.norm_squared()
}

/// `Φ_k(x_new) − Φ_k(x_old)` from the two evaluations, summed as
/// entrywise differences so that close points do not cancel at the scale
/// of `|Φ_k|`.
#[allow(clippy::too_many_arguments)]
pub fn phi_k_change<P: Problem + ?Sized>(
    p: &P,
    x_new: &Mat,
    new: &Evaluation,
    x_old: &Mat,
    old: &Evaluation,
    y_k: &Dual,
    lambda: f64,
    beta: f64,
) -> f64 {
    let mut dual = 0.0;
    for i in 0..y_k.len() {
        let (a1, a0, y1, y0) = (new.a[i], old.a[i], new.y_half[i], old.y_half[i]);
        let (dy, sy) = (y1 - y0, y1 + y0);
        dual += 0.5 * ((a1 - a0) * sy + (a1 + a0) * dy) - 0.5 * lambda * dy * sy - 0.5 * beta * dy * (sy - 2.0 * y_k[i]);
    }
    p.f_change(x_new, x_old) + dual
}

/// Everything the inner solvers need at one point: `A(x)`, the dual
/// maximizer and `Φ_k(x)` by the max route.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub f: f64,
    pub a: Dual,
    pub y_half: Dual,
    pub value: f64,
}

pub fn evaluate<P: Problem + ?Sized>(p: &P, x: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Evaluation {
    let f = p.f_value(x);
    let a = p.a_apply(x);
    let yh = y_half_from(&p.prox_family(), &a, y_k, lambda, beta);
    let value = f_k_value(f, &a, &yh, y_k, lambda, beta);
    Evaluation { f, a, y_half: yh, value }
}

/// Riemannian gradient `proj_x(∇f(x) + ∇A(x)ᵀ y)`.
pub fn riemannian_grad<P: Problem + ?Sized>(p: &P, x: &ManifoldPoint, y: &Dual) -> Result<TangentVector> {
    let b = x.basis();
    tangent_project(x, &(p.f_grad(b) + p.a_adjoint(b, y)))
}

/// Magnitude used to scale route-agreement tolerances of `Φ_k`.
pub(crate) fn phi_k_scale(ev: &Evaluation, y_k: &Dual, beta: f64) -> f64 {
    1.0 + ev.value.abs() + ev.f.abs() + beta * y_k.norm_squared()
}

/// `Φ_k(x)` computed by both the max route and the Moreau route.
///
/// Returns the max-route value; the routes must agree to `1e-8` relative
/// to the magnitude of the terms involved.
pub fn phi_k_value<P: Problem + ?Sized>(p: &P, x: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Result<f64> {
    let ev = evaluate(p, x, y_k, lambda, beta);
    let moreau = phi_k_moreau(&p.prox_family(), ev.f, &ev.a, y_k, lambda, beta);
    let gap = (ev.value - moreau).abs();
    if gap > 1e-8 * phi_k_scale(&ev, y_k, beta) {
        return Err(Error::ArithmeticMismatch {
            what: "value function",
            residual: gap,
        });
    }
    Ok(ev.value)
}

/// Euclidean gradient `∇f(x) + ∇A(x)ᵀ y_half(x)`.
pub fn phi_k_grad<P: Problem + ?Sized>(p: &P, x: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Mat {
    let yh = y_half(p, x, y_k, lambda, beta);
    p.f_grad(x) + p.a_adjoint(x, &yh)
}

/// Euclidean gradient of `Φ_k` through the envelope:
/// `∇f + ∇Aᵀ (v − prox_{th*}(v))/t` with `v = A(x) + β y_k`, `t = λ+β`.
pub fn phi_k_grad_moreau<P: Problem + ?Sized>(p: &P, x: &Mat, y_k: &Dual, lambda: f64, beta: f64) -> Mat {
    let w = y_update_moreau(&p.prox_family(), &p.a_apply(x), y_k, lambda, beta);
    p.f_grad(x) + p.a_adjoint(x, &w)
}

/// `δ_{k+1} = ‖(λ+β_k) y_{k+1} − β_k y_k‖_∞`.
pub fn delta_residual(y_next: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> f64 {
    // λ y + β (y − y_k) avoids cancelling two terms of size β‖y‖.
    let r = y_next * lambda + (y_next - y_k) * beta;
    inf_norm(r.as_slice())
}

/// `‖A(x_{k+1}) − p_{k+1}‖_∞` with `p_{k+1} = prox_{(λ+β)h*}(A(x_{k+1}) + β y_k)`.
pub fn delta_primal_residual(h: &ProxFamily, a_next: &Dual, y_k: &Dual, lambda: f64, beta: f64) -> f64 {
    let p = prox_h_conj(h, &(a_next + y_k * beta), lambda + beta);
    inf_norm((a_next - p).as_slice())
}

/// Adaptive schedule: shrink the running coefficient by `τ2` when the
/// residual fails to drop by a factor `τ1`, then divide by `(k+1)^ρ`.
///
/// Returns `(β_{k+1}, β1^{(k+1)})`.
pub fn beta_update(
    beta1_running: f64,
    delta_prev: f64,
    delta_next: f64,
    k_next: usize,
    tau1: f64,
    tau2: f64,
    rho: f64,
) -> (f64, f64) {
    let running = if delta_next >= tau1 * delta_prev {
        tau2 * beta1_running
    } else {
        beta1_running
    };
    (running / libm::pow(k_next as f64, rho), running)
}
