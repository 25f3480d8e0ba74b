use crate::convex::ProxFamily;
use crate::error::{Error, Result};
use crate::linalg::{flatten, l1_norm, spectral_norm_sq, sym_part, unflatten, Dual, Mat};
use crate::manifold::ManifoldDescriptor;

use super::{Lipschitz, Problem};

/// Sparse spectral clustering on `Gr(N, m)`:
/// `min_Q ⟨L, Q⟩ + μ‖Q‖₁` with `Q = XXᵀ`, `A(X) = XXᵀ` and `h` the
/// indicator of the ℓ∞-ball of radius `μ` in `R^{N×N}`.
#[derive(Debug, Clone)]
pub struct Ssc {
    laplacian: Mat,
    mu: f64,
    manifold: ManifoldDescriptor,
    h: ProxFamily,
    lipschitz: Lipschitz,
}

pub fn make_ssc(laplacian: Mat, m: usize, mu: f64) -> Result<Ssc> {
    let n = laplacian.nrows();
    if laplacian.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: laplacian.shape(),
        });
    }
    let residual = (&laplacian - laplacian.transpose()).norm();
    if residual > 1e-10 {
        return Err(Error::Asymmetric { residual });
    }
    let manifold = ManifoldDescriptor::grassmann(n, m)?;
    let h = ProxFamily::linf_ball(mu, n * n)?;
    // Ambient bounds on conv M, where ‖X‖ ≤ 1.
    let lipschitz = Lipschitz {
        grad_f: 2.0 * libm::sqrt(spectral_norm_sq(&laplacian)),
        map: 2.0,
        jacobian: 2.0,
        jacobian_bound: 2.0,
    };
    Ok(Ssc {
        laplacian,
        mu,
        manifold,
        h,
        lipschitz,
    })
}

impl Ssc {
    pub fn laplacian(&self) -> &Mat {
        &self.laplacian
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl Problem for Ssc {
    fn name(&self) -> &'static str {
        "ssc"
    }

    fn manifold(&self) -> ManifoldDescriptor {
        self.manifold
    }

    fn prox_family(&self) -> ProxFamily {
        self.h
    }

    fn f_value(&self, x: &Mat) -> f64 {
        x.dot(&(&self.laplacian * x))
    }

    fn f_change(&self, x_new: &Mat, x_old: &Mat) -> f64 {
        // L is symmetric, so ⟨X', LX'⟩ − ⟨X, LX⟩ = ⟨X' − X, L(X' + X)⟩.
        (x_new - x_old).dot(&(&self.laplacian * (x_new + x_old)))
    }

    fn f_grad(&self, x: &Mat) -> Mat {
        &self.laplacian * x * 2.0
    }

    fn a_apply(&self, x: &Mat) -> Dual {
        flatten(&(x * x.transpose()))
    }

    fn a_adjoint(&self, x: &Mat, y: &Dual) -> Mat {
        let n = x.nrows();
        let y = unflatten(y, n, n);
        (&y + y.transpose()) * x
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        Some(self.lipschitz)
    }

    fn projector_gradient(&self, q: &Mat, y: &Dual) -> Option<Mat> {
        let n = q.nrows();
        Some(&self.laplacian + sym_part(&unflatten(y, n, n)))
    }

    fn phi_value(&self, x: &Mat) -> f64 {
        self.f_value(x) + self.mu * l1_norm((x * x.transpose()).as_slice())
    }
}
