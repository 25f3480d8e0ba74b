use crate::convex::prox_h;
use crate::error::Result;
use crate::linalg::Dual;
use crate::manifold::ManifoldPoint;
use crate::problem::Problem;
use crate::report::{RgsCertificate, RosCertificate};

use super::value::riemannian_grad;

/// `(1/γ)‖y − prox_{γh}(y + γ a)‖`.
pub(crate) fn dual_residual<P: Problem + ?Sized>(p: &P, a: &Dual, y: &Dual, gamma: f64) -> f64 {
    (y - prox_h(&p.prox_family(), &(y + a * gamma), gamma)).norm() / gamma
}

/// ε-RGS test at `(x, y_probe)`.
pub fn check_rgs<P: Problem + ?Sized>(
    p: &P,
    x: &ManifoldPoint,
    y_probe: &Dual,
    gamma: f64,
    eps: f64,
) -> Result<RgsCertificate> {
    let g_res = riemannian_grad(p, x, y_probe)?.norm();
    let y_res = dual_residual(p, &p.a_apply(x.basis()), y_probe, gamma);
    Ok(RgsCertificate {
        pass: g_res.max(y_res) <= eps,
        g_res,
        y_res,
    })
}

/// ε-ROS test at `x`, built from `z = prox_{h/λ}(A(x)/λ)`.
pub fn check_ros<P: Problem + ?Sized>(p: &P, x: &ManifoldPoint, lambda: f64, eps: f64) -> Result<RosCertificate> {
    let a = p.a_apply(x.basis());
    let z = prox_h(&p.prox_family(), &(a / lambda), 1.0 / lambda);
    let g_res = riemannian_grad(p, x, &z)?.norm();
    let p_res = lambda * z.norm();
    Ok(RosCertificate {
        pass: g_res.max(p_res) <= eps,
        g_res,
        p_res,
    })
}
