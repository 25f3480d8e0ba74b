//! Dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense real matrix, column-major.
pub type Mat = DMatrix<f64>;
/// Dense real vector; also the flattened representation of dual variables.
pub type Dual = DVector<f64>;

/// Pivots or eigengaps below this magnitude are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

pub fn frob_dot(a: &Mat, b: &Mat) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `‖XᵀX − I‖_F`.
pub fn orthonormality_residual(x: &Mat) -> f64 {
    let mut gram = x.tr_mul(x);
    for i in 0..gram.nrows() {
        gram[(i, i)] -= 1.0;
    }
    gram.norm()
}

pub fn sym_part(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn flatten(m: &Mat) -> Dual {
    Dual::from_column_slice(m.as_slice())
}

pub fn unflatten(v: &Dual, rows: usize, cols: usize) -> Mat {
    Mat::from_column_slice(rows, cols, v.as_slice())
}

/// Thin QR factor of a tall matrix with the diagonal of `R` forced positive.
pub fn qr_positive(m: &Mat) -> Result<Mat> {
    let (n, p) = m.shape();
    if n < p {
        return Err(Error::ShapeMismatch {
            expected: (p, p),
            found: (n, p),
        });
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        let d = r[(j, j)];
        if d.abs() < DEGENERACY_TOL || !d.is_finite() {
            return Err(Error::DegenerateStep { pivot: d });
        }
        if d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
///
/// Each eigenvector is signed so that its largest-magnitude entry is positive.
pub fn sym_eigen_ascending(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(sym_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Largest singular value squared, i.e. `λ_max(MMᵀ)`.
pub fn spectral_norm_sq(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let s = m.clone().singular_values();
    let top = s.iter().copied().fold(0.0_f64, f64::max);
    top * top
}

/// Squared singular values in descending order.
pub fn singular_values_sq_desc(m: &Mat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().map(|v| v * v).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
