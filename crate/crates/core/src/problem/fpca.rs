use alloc::vec::Vec;

use crate::convex::ProxFamily;
use crate::error::{Error, Result};
use crate::linalg::{Dual, Mat};
use crate::manifold::ManifoldDescriptor;

use super::Problem;

/// Fair PCA: `min_{X∈St(d,r)} max_{y∈Δ_m} −Σ_i y_i ⟨A_iA_iᵀ, XXᵀ⟩`.
///
/// No Lipschitz bundle is provided, so the projected-gradient inner solver
/// is unavailable for this family.
#[derive(Debug, Clone)]
pub struct Fpca {
    groups: Vec<Mat>,
    manifold: ManifoldDescriptor,
    h: ProxFamily,
}

pub fn make_fpca(groups: Vec<Mat>, r: usize) -> Result<Fpca> {
    let first = groups.first().ok_or(Error::EmptyInput)?;
    let d = first.nrows();
    for g in &groups {
        if g.nrows() != d {
            return Err(Error::ShapeMismatch {
                expected: (d, g.ncols()),
                found: g.shape(),
            });
        }
    }
    let manifold = ManifoldDescriptor::stiefel(d, r)?;
    let h = ProxFamily::simplex(groups.len())?;
    Ok(Fpca { groups, manifold, h })
}

impl Fpca {
    /// One group per data column.
    pub fn from_columns(data: &Mat, r: usize) -> Result<Fpca> {
        let groups = (0..data.ncols()).map(|j| data.columns(j, 1).clone_owned()).collect();
        make_fpca(groups, r)
    }

    pub fn groups(&self) -> &[Mat] {
        &self.groups
    }
}

impl Problem for Fpca {
    fn name(&self) -> &'static str {
        "fpca"
    }

    fn manifold(&self) -> ManifoldDescriptor {
        self.manifold
    }

    fn prox_family(&self) -> ProxFamily {
        self.h
    }

    fn f_value(&self, _x: &Mat) -> f64 {
        0.0
    }

    fn f_grad(&self, x: &Mat) -> Mat {
        Mat::zeros(x.nrows(), x.ncols())
    }

    fn a_apply(&self, x: &Mat) -> Dual {
        Dual::from_iterator(self.groups.len(), self.groups.iter().map(|g| -g.tr_mul(x).norm_squared()))
    }

    fn a_adjoint(&self, x: &Mat, y: &Dual) -> Mat {
        let mut out = Mat::zeros(x.nrows(), x.ncols());
        for (g, &w) in self.groups.iter().zip(y.iter()) {
            if w != 0.0 {
                out += g * g.tr_mul(x) * (-2.0 * w);
            }
        }
        out
    }

    fn phi_value(&self, x: &Mat) -> f64 {
        self.a_apply(x).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::random_point;
    use crate::problem::testing::{check_oracles, gaussian};
    use alloc::vec;

    #[test]
    fn single_group_is_pca() {
        let a = gaussian(6, 9, 1);
        let p = make_fpca(vec![a.clone()], 2).unwrap();
        let cov = &a * a.transpose();
        let eig = crate::linalg::sym_eigen_ascending(&cov);
        let top = eig.1.columns(4, 2).clone_owned();
        let expected = -(eig.0[4] + eig.0[5]);
        assert!((p.phi_value(&top) - expected).abs() < 1e-9);
        let x = random_point(p.manifold(), 3);
        assert!(p.phi_value(x.basis()) >= expected - 1e-9);
    }

    #[test]
    fn adjoint_on_basis_vector() {
        let groups = vec![gaussian(5, 3, 1), gaussian(5, 2, 2), gaussian(5, 4, 3)];
        let p = make_fpca(groups.clone(), 2).unwrap();
        let x = random_point(p.manifold(), 4);
        let mut y = Dual::zeros(3);
        y[1] = 1.0;
        let expected = &groups[1] * groups[1].transpose() * x.basis() * -2.0;
        assert!((p.a_adjoint(x.basis(), &y) - expected).norm() < 1e-12);
    }

    #[test]
    fn oracles_match_finite_differences() {
        let p = Fpca::from_columns(&gaussian(8, 3, 5), 2).unwrap();
        check_oracles(&p, 20);
        assert!(p.lipschitz().is_none());
        assert_eq!(p.dual_radius(), 1.0);
    }

    #[test]
    fn inconsistent_rows_rejected() {
        assert!(make_fpca(vec![gaussian(4, 2, 0), gaussian(5, 2, 1)], 2).is_err());
        assert!(make_fpca(vec![], 2).is_err());
    }
}
