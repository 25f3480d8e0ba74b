use crate::convex::ProxFamily;
use crate::error::{Error, Result};
use crate::linalg::{flatten, l1_norm, spectral_norm_sq, unflatten, Dual, Mat};
use crate::manifold::ManifoldDescriptor;

use super::{Lipschitz, Problem};

/// Sparse PCA: `min_{X∈St(d,r)} −⟨AAᵀ, XXᵀ⟩ + μ‖X‖₁`, with `A(X) = X` and
/// `h` the indicator of the ℓ∞-ball of radius `μ`.
#[derive(Debug, Clone)]
pub struct Spca {
    data: Mat,
    manifold: ManifoldDescriptor,
    h: ProxFamily,
    lipschitz: Lipschitz,
}

pub fn make_spca(data: Mat, r: usize, mu: f64) -> Result<Spca> {
    let d = data.nrows();
    if data.ncols() == 0 {
        return Err(Error::EmptyInput);
    }
    let manifold = ManifoldDescriptor::stiefel(d, r)?;
    let h = ProxFamily::linf_ball(mu, d * r)?;
    let lipschitz = Lipschitz {
        grad_f: 2.0 * spectral_norm_sq(&data),
        map: 1.0,
        jacobian: 0.0,
        jacobian_bound: 1.0,
    };
    Ok(Spca {
        data,
        manifold,
        h,
        lipschitz,
    })
}

impl Spca {
    pub fn data(&self) -> &Mat {
        &self.data
    }

    pub fn mu(&self) -> f64 {
        match self.h {
            ProxFamily::LinfBall { radius, .. } => radius,
            ProxFamily::Simplex { .. } => unreachable!("SPCA uses the ball family"),
        }
    }
}

impl Problem for Spca {
    fn name(&self) -> &'static str {
        "spca"
    }

    fn manifold(&self) -> ManifoldDescriptor {
        self.manifold
    }

    fn prox_family(&self) -> ProxFamily {
        self.h
    }

    fn f_value(&self, x: &Mat) -> f64 {
        -self.data.tr_mul(x).norm_squared()
    }

    fn f_change(&self, x_new: &Mat, x_old: &Mat) -> f64 {
        // Differences of f̃(X) = −tr((XᵀX)⁻¹ XᵀAAᵀX), which equals f on the
        // manifold but does not see the orthonormality rounding of the
        // basis; that rounding times |f| would otherwise swamp small steps.
        let d = x_new - x_old;
        let (Some(gi_old), Some(gi_new)) = (x_old.tr_mul(x_old).try_inverse(), x_new.tr_mul(x_new).try_inverse())
        else {
            return self.f_value(x_new) - self.f_value(x_old);
        };
        let b_old = self.data.tr_mul(x_old);
        let b_new = self.data.tr_mul(x_new);
        let b_d = self.data.tr_mul(&d);
        // S' − S and G' − G, each formed from the difference directly.
        let ds = b_d.tr_mul(&b_new) + b_old.tr_mul(&b_d);
        let dg = d.tr_mul(x_new) + x_old.tr_mul(&d);
        let s_old = b_old.tr_mul(&b_old);
        -(&gi_new * ds).trace() + (&gi_new * dg * gi_old * s_old).trace()
    }

    fn f_grad(&self, x: &Mat) -> Mat {
        &self.data * self.data.tr_mul(x) * -2.0
    }

    fn a_apply(&self, x: &Mat) -> Dual {
        flatten(x)
    }

    fn a_adjoint(&self, x: &Mat, y: &Dual) -> Mat {
        unflatten(y, x.nrows(), x.ncols())
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        Some(self.lipschitz)
    }

    fn phi_value(&self, x: &Mat) -> f64 {
        self.f_value(x) + self.mu() * l1_norm(x.as_slice())
    }
}
