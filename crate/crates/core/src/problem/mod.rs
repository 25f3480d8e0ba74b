//! Oracle bundles for `min_{x∈M} max_y f(x) + ⟨A(x), y⟩ − h(y)`.

mod data;
mod fpca;
mod spca;
mod ssc;

pub use data::{
    affinity_gaussian, affinity_inner_abs, build_laplacian, gen_gaussian_points, spectral_init, Dataset,
};
pub use fpca::{make_fpca, Fpca};
pub use spca::{make_spca, Spca};
pub use ssc::{make_ssc, Ssc};

use crate::convex::{h_conj_value, ProxFamily};
use crate::linalg::{Dual, Mat};
use crate::manifold::ManifoldDescriptor;

/// Smoothness constants over the convex hull of the manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    /// Lipschitz constant of `∇f`.
    pub grad_f: f64,
    /// Lipschitz constant of `A`.
    pub map: f64,
    /// Lipschitz constant of the Jacobian `∇A`.
    pub jacobian: f64,
    /// Bound on the operator norm of `∇A`.
    pub jacobian_bound: f64,
}

/// A concrete nonconvex-linear minimax instance.
///
/// All oracles take the basis representation of a manifold point. For
/// Grassmann instances they must be invariant under `X -> XO`.
pub trait Problem: Sync {
    fn name(&self) -> &'static str;

    fn manifold(&self) -> ManifoldDescriptor;

    fn prox_family(&self) -> ProxFamily;

    fn f_value(&self, x: &Mat) -> f64;

    /// `f(x_new) − f(x_old)`. Overrides avoid the cancellation of the
    /// naive difference when the two points are close.
    fn f_change(&self, x_new: &Mat, x_old: &Mat) -> f64 {
        self.f_value(x_new) - self.f_value(x_old)
    }

    /// Euclidean gradient of `f` with respect to the basis.
    fn f_grad(&self, x: &Mat) -> Mat;

    fn a_apply(&self, x: &Mat) -> Dual;

    /// `∇A(x)ᵀ y`.
    fn a_adjoint(&self, x: &Mat, y: &Dual) -> Mat;

    fn lipschitz(&self) -> Option<Lipschitz> {
        None
    }

    /// Euclidean gradient of `Q ↦ f + ⟨A, y⟩` in the projector embedding
    /// `Q = XXᵀ`, for Grassmann instances that are functions of the projector.
    fn projector_gradient(&self, _q: &Mat, _y: &Dual) -> Option<Mat> {
        None
    }

    /// `Φ(x) = f(x) + h*(A(x))`.
    fn phi_value(&self, x: &Mat) -> f64 {
        self.f_value(x) + h_conj_value(&self.prox_family(), &self.a_apply(x))
    }

    fn dual_radius(&self) -> f64 {
        self.prox_family().dual_radius()
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn manifold(&self) -> ManifoldDescriptor {
        (**self).manifold()
    }
    fn prox_family(&self) -> ProxFamily {
        (**self).prox_family()
    }
    fn f_value(&self, x: &Mat) -> f64 {
        (**self).f_value(x)
    }
    fn f_change(&self, x_new: &Mat, x_old: &Mat) -> f64 {
        (**self).f_change(x_new, x_old)
    }
    fn f_grad(&self, x: &Mat) -> Mat {
        (**self).f_grad(x)
    }
    fn a_apply(&self, x: &Mat) -> Dual {
        (**self).a_apply(x)
    }
    fn a_adjoint(&self, x: &Mat, y: &Dual) -> Mat {
        (**self).a_adjoint(x, y)
    }
    fn lipschitz(&self) -> Option<Lipschitz> {
        (**self).lipschitz()
    }
    fn projector_gradient(&self, q: &Mat, y: &Dual) -> Option<Mat> {
        (**self).projector_gradient(q, y)
    }
    fn phi_value(&self, x: &Mat) -> f64 {
        (**self).phi_value(x)
    }
}
