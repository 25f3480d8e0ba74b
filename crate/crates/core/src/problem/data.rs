use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen_ascending, Mat};
use crate::manifold::{ManifoldDescriptor, ManifoldPoint};

/// Samples stored column-wise, with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Mat,
    pub labels: Option<Vec<usize>>,
    pub name: String,
}

impl Dataset {
    pub fn new(points: Mat, labels: Option<Vec<usize>>, name: impl Into<String>) -> Result<Self> {
        if points.ncols() < 2 || points.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "entries must be finite",
            });
        }
        if let Some(l) = &labels {
            if l.len() != points.ncols() {
                return Err(Error::ShapeMismatch {
                    expected: (points.ncols(), 1),
                    found: (l.len(), 1),
                });
            }
        }
        Ok(Dataset {
            points,
            labels,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    /// Number of distinct labels, if labelled.
    pub fn classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }
}

/// A `d×N` matrix of i.i.d. standard normal entries.
pub fn gen_gaussian_points(d: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = Mat::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
    Dataset {
        points,
        labels: None,
        name: String::from("gaussian"),
    }
}

/// `W_ij = |⟨a_i, a_j⟩|`.
pub fn affinity_inner_abs(points: &Mat) -> Mat {
    points.tr_mul(points).abs()
}

/// `W_ij = exp(−‖a_i − a_j‖² / κ)`, diagonal kept at one.
pub fn affinity_gaussian(points: &Mat, kappa: f64) -> Result<Mat> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: "must be positive",
        });
    }
    let n = points.ncols();
    let mut w = Mat::identity(n, n);
    for j in 0..n {
        for i in 0..j {
            let d2 = (points.column(i) - points.column(j)).norm_squared();
            let v = libm::exp(-d2 / kappa);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok(w)
}

/// Normalized Laplacian `I − S^{−1/2} W S^{−1/2}`.
pub fn build_laplacian(w: &Mat) -> Result<Mat> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: w.shape(),
        });
    }
    let residual = (w - w.transpose()).norm();
    if residual > 1e-10 * w.norm().max(1.0) {
        return Err(Error::Asymmetric { residual });
    }
    let mut inv_sqrt = Vec::with_capacity(n);
    for i in 0..n {
        let s: f64 = w.row(i).iter().sum();
        if !(s > 0.0) {
            return Err(Error::IsolatedNode { index: i });
        }
        inv_sqrt.push(1.0 / libm::sqrt(s));
    }
    let mut l = Mat::from_fn(n, n, |i, j| -w[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    for i in 0..n {
        l[(i, i)] += 1.0;
    }
    // Exact symmetry keeps downstream symmetry checks tight.
    let l = (&l + l.transpose()) * 0.5;
    Ok(l)
}

/// Basis of the `m` smallest-eigenvalue eigenvectors of `L` on `Gr(N, m)`.
pub fn spectral_init(l: &Mat, m: usize) -> Result<ManifoldPoint> {
    let n = l.nrows();
    let desc = ManifoldDescriptor::grassmann(n, m)?;
    if l.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "laplacian",
            reason: "eigensolver needs finite entries",
        });
    }
    let (_, vecs) = sym_eigen_ascending(l);
    ManifoldPoint::new(desc, vecs.columns(0, m).clone_owned())
}
