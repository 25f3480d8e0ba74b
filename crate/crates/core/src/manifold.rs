//! Stiefel and Grassmann geometry.
//!
//! Points are stored as orthonormal bases. A Grassmann point denotes the
//! subspace (equivalently the projector `XXᵀ`) spanned by its basis, so any
//! quantity computed from it must be invariant under `X -> XO` for orthogonal
//! `O`. Tangent vectors of the Grassmann manifold live in the horizontal space
//! `{V : XᵀV = 0}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_residual, qr_positive, sym_eigen_ascending, sym_part, Mat, DEGENERACY_TOL};

/// Orthonormality tolerance enforced by [`ManifoldPoint::new`].
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldDescriptor {
    /// `{X ∈ R^{rows×cols} : XᵀX = I}`.
    Stiefel { rows: usize, cols: usize },
    /// `cols`-dimensional subspaces of `R^rows`, as orthonormal bases modulo rotation.
    Grassmann { rows: usize, cols: usize },
}

impl ManifoldDescriptor {
    pub fn stiefel(rows: usize, cols: usize) -> Result<Self> {
        Self::Stiefel { rows, cols }.validated()
    }

    pub fn grassmann(rows: usize, cols: usize) -> Result<Self> {
        Self::Grassmann { rows, cols }.validated()
    }

    fn validated(self) -> Result<Self> {
        let (n, p) = self.shape();
        if p == 0 || n < p {
            return Err(Error::InvalidParameter {
                name: "manifold",
                reason: "requires rows >= cols >= 1",
            });
        }
        Ok(self)
    }

    /// Shape `(n, p)` of a basis matrix.
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Self::Stiefel { rows, cols } | Self::Grassmann { rows, cols } => (rows, cols),
        }
    }

    pub fn is_grassmann(&self) -> bool {
        matches!(self, Self::Grassmann { .. })
    }

    fn check_shape(&self, m: &Mat) -> Result<()> {
        if m.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: m.shape(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    basis: Mat,
    descriptor: ManifoldDescriptor,
}

impl ManifoldPoint {
    /// Wraps a basis after checking shape and orthonormality.
    pub fn new(descriptor: ManifoldDescriptor, basis: Mat) -> Result<Self> {
        descriptor.check_shape(&basis)?;
        let residual = orthonormality_residual(&basis);
        if !(residual <= FEASIBILITY_TOL) {
            return Err(Error::Infeasible { residual });
        }
        Ok(Self { basis, descriptor })
    }

    pub(crate) fn new_unchecked(descriptor: ManifoldDescriptor, basis: Mat) -> Self {
        Self { basis, descriptor }
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn into_basis(self) -> Mat {
        self.basis
    }

    pub fn descriptor(&self) -> ManifoldDescriptor {
        self.descriptor
    }

    /// `XXᵀ`.
    pub fn projector(&self) -> Mat {
        &self.basis * self.basis.transpose()
    }
}

/// A tangent (or, for Grassmann, horizontal) vector at some point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(pub Mat);

impl TangentVector {
    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }
}

/// Gaussian matrix orthonormalized by positive-diagonal QR.
pub fn random_point(descriptor: ManifoldDescriptor, seed: u64) -> ManifoldPoint {
    let (n, p) = descriptor.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = Mat::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng));
        // A Gaussian draw is rank-deficient with probability zero.
        if let Ok(q) = qr_positive(&g) {
            return ManifoldPoint::new_unchecked(descriptor, q);
        }
    }
}

/// Orthogonal projection of an ambient matrix onto the tangent space at `x`.
pub fn tangent_project(x: &ManifoldPoint, g: &Mat) -> Result<TangentVector> {
    x.descriptor.check_shape(g)?;
    let basis = &x.basis;
    let xtg = basis.tr_mul(g);
    let v = match x.descriptor {
        ManifoldDescriptor::Stiefel { .. } => g - basis * sym_part(&xtg),
        ManifoldDescriptor::Grassmann { .. } => g - basis * xtg,
    };
    Ok(TangentVector(v))
}

/// QR-based retraction `R_x(v) = qf(X + V)`.
pub fn retract(x: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
    x.descriptor.check_shape(&v.0)?;
    if v.0.iter().all(|&e| e == 0.0) {
        return Ok(x.clone());
    }
    let q = qr_positive(&(&x.basis + &v.0))?;
    Ok(ManifoldPoint::new_unchecked(x.descriptor, q))
}

/// Euclidean projection onto the manifold.
///
/// Stiefel: `m` has the basis shape and the polar factor `UVᵀ` is returned.
/// Grassmann: `m` is an `n×n` ambient matrix and the leading `p` eigenvectors
/// of `sym(m)` are returned, which is the nearest rank-`p` projector.
pub fn project_to_manifold(descriptor: ManifoldDescriptor, m: &Mat) -> Result<ManifoldPoint> {
    let (n, p) = descriptor.shape();
    match descriptor {
        ManifoldDescriptor::Stiefel { .. } => {
            descriptor.check_shape(m)?;
            let svd = m.clone().svd(true, true);
            let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
            if !(smin >= DEGENERACY_TOL) {
                return Err(Error::DegenerateProjection { gap: smin });
            }
            let u = svd.u.ok_or(Error::DegenerateProjection { gap: 0.0 })?;
            let vt = svd.v_t.ok_or(Error::DegenerateProjection { gap: 0.0 })?;
            let polar = u * vt;
            // Re-orthonormalize to keep feasibility at machine precision.
            Ok(ManifoldPoint::new_unchecked(descriptor, polish(polar)))
        }
        ManifoldDescriptor::Grassmann { .. } => {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    found: m.shape(),
                });
            }
            let (values, vectors) = sym_eigen_ascending(m);
            if p < n {
                let gap = values[n - p] - values[n - p - 1];
                if !(gap >= DEGENERACY_TOL) {
                    return Err(Error::DegenerateProjection { gap });
                }
            }
            let mut basis = Mat::zeros(n, p);
            for j in 0..p {
                basis.set_column(j, &vectors.column(n - 1 - j));
            }
            Ok(ManifoldPoint::new_unchecked(descriptor, polish(basis)))
        }
    }
}

fn polish(q: Mat) -> Mat {
    if orthonormality_residual(&q) <= 1e-14 {
        return q;
    }
    qr_positive(&q).unwrap_or(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frob_dot, Dual};
    use alloc::vec;

    fn gaussian(n: usize, p: usize, seed: u64) -> Mat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn descriptor_validation() {
        assert!(ManifoldDescriptor::stiefel(2, 3).is_err());
        assert!(ManifoldDescriptor::grassmann(3, 0).is_err());
        assert!(ManifoldDescriptor::stiefel(1, 1).is_ok());
    }

    #[test]
    fn random_point_scalar_case() {
        let d = ManifoldDescriptor::stiefel(1, 1).unwrap();
        for seed in 0..5 {
            let x = random_point(d, seed);
            assert_eq!(x.basis()[(0, 0)].abs(), 1.0);
        }
    }

    #[test]
    fn random_point_is_feasible_and_deterministic() {
        let x = random_point(ManifoldDescriptor::stiefel(5, 2).unwrap(), 7);
        assert!(orthonormality_residual(x.basis()) <= 1e-12);
        let g = ManifoldDescriptor::grassmann(6, 3).unwrap();
        assert_eq!(random_point(g, 1).basis(), random_point(g, 1).basis());
        assert_ne!(random_point(g, 1).basis(), random_point(g, 2).basis());
    }

    #[test]
    fn stiefel_projection_of_normal_direction_vanishes() {
        let x = random_point(ManifoldDescriptor::stiefel(6, 3).unwrap(), 3);
        let v = tangent_project(&x, x.basis()).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn grassmann_vertical_directions_vanish() {
        let x = random_point(ManifoldDescriptor::grassmann(6, 3).unwrap(), 4);
        let b = gaussian(3, 3, 9);
        let v = tangent_project(&x, &(x.basis() * b)).unwrap();
        assert!(v.norm() < 1e-13);
    }

    #[test]
    fn stiefel_column_projection_by_hand() {
        let d = ManifoldDescriptor::stiefel(3, 1).unwrap();
        let x = ManifoldPoint::new(d, Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let g = Mat::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let v = tangent_project(&x, &g).unwrap();
        assert_eq!(v.0, Mat::from_column_slice(3, 1, &[0.0, 2.0, 3.0]));
    }

    #[test]
    fn tangent_invariants() {
        let xs = random_point(ManifoldDescriptor::stiefel(7, 3).unwrap(), 11);
        let xg = random_point(ManifoldDescriptor::grassmann(7, 3).unwrap(), 12);
        let g = gaussian(7, 3, 13);
        let vs = tangent_project(&xs, &g).unwrap().0;
        let skew = xs.basis().tr_mul(&vs) + vs.tr_mul(xs.basis());
        assert!(skew.norm() < 1e-12);
        let vg = tangent_project(&xg, &g).unwrap().0;
        assert!(xg.basis().tr_mul(&vg).norm() < 1e-12);
    }

    #[test]
    fn projection_idempotent_and_self_adjoint() {
        for seed in 0..100u64 {
            let desc = if seed % 2 == 0 {
                ManifoldDescriptor::stiefel(6, 2).unwrap()
            } else {
                ManifoldDescriptor::grassmann(6, 2).unwrap()
            };
            let x = random_point(desc, seed);
            let g = gaussian(6, 2, 1000 + seed);
            let h = gaussian(6, 2, 2000 + seed);
            let pg = tangent_project(&x, &g).unwrap().0;
            let ppg = tangent_project(&x, &pg).unwrap().0;
            assert!((&ppg - &pg).norm() <= 1e-12);
            let ph = tangent_project(&x, &h).unwrap().0;
            assert!((frob_dot(&pg, &h) - frob_dot(&g, &ph)).abs() <= 1e-12);
        }
    }

    #[test]
    fn retract_zero_is_identity_bitwise() {
        let x = random_point(ManifoldDescriptor::stiefel(5, 3).unwrap(), 5);
        let zero = TangentVector(Mat::zeros(5, 3));
        assert_eq!(retract(&x, &zero).unwrap(), x);
    }

    #[test]
    fn retract_column_normalization() {
        let d = ManifoldDescriptor::stiefel(2, 1).unwrap();
        let x = ManifoldPoint::new(d, Mat::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let v = TangentVector(Mat::from_column_slice(2, 1, &[0.0, 1.0]));
        let y = retract(&x, &v).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((y.basis()[(0, 0)] - s).abs() < 1e-15);
        assert!((y.basis()[(1, 0)] - s).abs() < 1e-15);
    }

    #[test]
    fn retraction_second_order_deviation() {
        let x = random_point(ManifoldDescriptor::stiefel(4, 2).unwrap(), 21);
        let v = tangent_project(&x, &gaussian(4, 2, 22)).unwrap();
        let v = v.scaled(1.0 / v.norm());
        let small = v.scaled(1e-6);
        let y = retract(&x, &small).unwrap();
        assert!((y.basis() - (x.basis() + &small.0)).norm() <= 1e-10);

        let mut last = f64::INFINITY;
        for t in [1e-3, 1e-4, 1e-5] {
            let y = retract(&x, &v.scaled(t)).unwrap();
            let ratio = (y.basis() - x.basis() - &v.scaled(t).0).norm() / t;
            assert!(ratio < last);
            last = ratio;
        }
    }

    #[test]
    fn retract_stays_feasible() {
        for seed in 0..20u64 {
            let x = random_point(ManifoldDescriptor::grassmann(8, 3).unwrap(), seed);
            let v = tangent_project(&x, &gaussian(8, 3, seed + 50)).unwrap();
            let y = retract(&x, &v).unwrap();
            assert!(orthonormality_residual(y.basis()) <= 1e-12);
        }
    }

    #[test]
    fn project_feasible_point_is_fixed() {
        let d = ManifoldDescriptor::stiefel(6, 3).unwrap();
        let x = random_point(d, 8);
        let y = project_to_manifold(d, x.basis()).unwrap();
        assert!((y.basis() - x.basis()).norm() < 1e-12);

        let dg = ManifoldDescriptor::grassmann(6, 3).unwrap();
        let xg = random_point(dg, 9);
        let yg = project_to_manifold(dg, &xg.projector()).unwrap();
        assert!((yg.projector() - xg.projector()).norm() < 1e-12);
    }

    #[test]
    fn project_positive_diagonal_gives_identity() {
        let d = ManifoldDescriptor::stiefel(2, 2).unwrap();
        let m = Mat::from_diagonal(&Dual::from_vec(vec![2.0, 3.0]));
        let y = project_to_manifold(d, &m).unwrap();
        assert!((y.basis() - Mat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn grassmann_projection_picks_leading_eigenvector() {
        let d = ManifoldDescriptor::grassmann(3, 1).unwrap();
        let m = Mat::from_diagonal(&Dual::from_vec(vec![5.0, 1.0, 0.0]));
        let y = project_to_manifold(d, &m).unwrap();
        assert_eq!(y.basis(), &Mat::from_column_slice(3, 1, &[1.0, 0.0, 0.0]));
    }

    #[test]
    fn degenerate_projections_are_rejected() {
        let d = ManifoldDescriptor::stiefel(3, 2).unwrap();
        assert!(matches!(
            project_to_manifold(d, &Mat::zeros(3, 2)),
            Err(Error::DegenerateProjection { .. })
        ));
        let g = ManifoldDescriptor::grassmann(3, 1).unwrap();
        assert!(matches!(
            project_to_manifold(g, &Mat::identity(3, 3)),
            Err(Error::DegenerateProjection { .. })
        ));
    }

    #[test]
    fn new_checks_feasibility() {
        let d = ManifoldDescriptor::stiefel(2, 1).unwrap();
        assert!(matches!(
            ManifoldPoint::new(d, Mat::from_column_slice(2, 1, &[1.0, 1.0])),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            ManifoldPoint::new(d, Mat::zeros(3, 1)),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
