//! Proximal mappings, conjugates and Moreau envelopes for the two dual
//! families used by the problem instances: the ℓ∞-ball indicator and the
//! standard-simplex indicator.
//!
//! Matrix-valued duals are handled in flattened form under the Frobenius
//! inner product.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, l1_norm, Dual};

/// The convex function `h` of the minimax objective, always the indicator of
/// a compact convex set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProxFamily {
    /// Indicator of `{y : ‖y‖∞ ≤ radius}` on `len` entries. Its conjugate is
    /// `radius·‖·‖₁`.
    LinfBall { radius: f64, len: usize },
    /// Indicator of the standard simplex in `R^dim`. Its conjugate is the
    /// max-coordinate function.
    Simplex { dim: usize },
}

/// Which function a Moreau envelope is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// `h` itself.
    Indicator,
    /// The conjugate `h*`.
    Conjugate,
}

impl ProxFamily {
    /// A zero radius is allowed and yields the indicator of `{0}`.
    pub fn linf_ball(radius: f64, len: usize) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: "ball radius must be finite and nonnegative",
            });
        }
        if len == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self::LinfBall { radius, len })
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Self::Simplex { dim })
    }

    /// Number of scalar entries of a dual vector.
    pub fn len(&self) -> usize {
        match *self {
            Self::LinfBall { len, .. } => len,
            Self::Simplex { dim } => dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `R = max_{y ∈ dom h} ‖y‖`.
    pub fn dual_radius(&self) -> f64 {
        match *self {
            Self::LinfBall { radius, len } => radius * libm::sqrt(len as f64),
            Self::Simplex { .. } => 1.0,
        }
    }

    /// Distance-like violation of `y ∈ dom h`; zero when feasible.
    pub fn feasibility_residual(&self, y: &Dual) -> f64 {
        match *self {
            Self::LinfBall { radius, .. } => (inf_norm(y.as_slice()) - radius).max(0.0),
            Self::Simplex { .. } => {
                let sum: f64 = y.iter().sum();
                let neg = y.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
                (sum - 1.0).abs().max(neg)
            }
        }
    }

    /// The default dual starting point `prox_h(0)`.
    pub fn origin_projection(&self) -> Dual {
        prox_h(self, &Dual::zeros(self.len()), 1.0)
    }
}

/// `prox_{t h}(v)`, the Euclidean projection onto `dom h` for every `t > 0`.
pub fn prox_h(h: &ProxFamily, v: &Dual, _t: f64) -> Dual {
    match *h {
        ProxFamily::LinfBall { radius, .. } => v.map(|e| e.clamp(-radius, radius)),
        ProxFamily::Simplex { .. } => project_simplex(v),
    }
}

/// Euclidean projection onto the standard simplex by sorting and thresholding.
pub fn project_simplex(v: &Dual) -> Dual {
    let n = v.len();
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    let mut out = v.map(|e| (e - theta).max(0.0));
    // Absorb the rounding drift of the threshold into the support.
    let sum: f64 = out.iter().sum();
    if sum > 0.0 && n > 0 {
        let support = out.iter().filter(|&&e| e > 0.0).count().max(1) as f64;
        let shift = (sum - 1.0) / support;
        for e in out.iter_mut() {
            if *e > 0.0 {
                *e = (*e - shift).max(0.0);
            }
        }
    }
    out
}

/// Entrywise soft-thresholding at `level`.
pub fn soft_threshold(v: &Dual, level: f64) -> Dual {
    v.map(|e| {
        if e > level {
            e - level
        } else if e < -level {
            e + level
        } else {
            0.0
        }
    })
}

/// `h*(u)`.
pub fn h_conj_value(h: &ProxFamily, u: &Dual) -> f64 {
    match *h {
        ProxFamily::LinfBall { radius, .. } => radius * l1_norm(u.as_slice()),
        ProxFamily::Simplex { .. } => u.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// `prox_{t h*}(v)`.
///
/// The ball family uses soft-thresholding directly; the simplex family goes
/// through the Moreau decomposition `v − t·prox_{h/t}(v/t)`.
pub fn prox_h_conj(h: &ProxFamily, v: &Dual, t: f64) -> Dual {
    match *h {
        ProxFamily::LinfBall { radius, .. } => soft_threshold(v, t * radius),
        ProxFamily::Simplex { .. } => v - project_simplex(&(v / t)) * t,
    }
}

/// `M_{t g}(v)` for `g = h` or `g = h*`, evaluated at the prox point.
pub fn moreau_env_value(h: &ProxFamily, which: Envelope, v: &Dual, t: f64) -> f64 {
    match which {
        Envelope::Indicator => {
            let p = prox_h(h, v, t);
            (v - p).norm_squared() / (2.0 * t)
        }
        Envelope::Conjugate => {
            let p = prox_h_conj(h, v, t);
            h_conj_value(h, &p) + (v - &p).norm_squared() / (2.0 * t)
        }
    }
}

/// `∇M_{t g}(v)`, computed as `(v − prox_{t g}(v))/t` and cross-checked
/// against `prox_{g*/t}(v/t)`.
pub fn moreau_env_grad(h: &ProxFamily, which: Envelope, v: &Dual, t: f64) -> Result<Dual> {
    let (residual_route, conjugate_route) = match which {
        Envelope::Indicator => {
            let direct = (v - prox_h(h, v, t)) / t;
            let dual = prox_h_conj(h, &(v / t), 1.0 / t);
            (direct, dual)
        }
        Envelope::Conjugate => {
            let direct = (v - prox_h_conj(h, v, t)) / t;
            let dual = prox_h(h, &(v / t), 1.0 / t);
            (direct, dual)
        }
    };
    let gap = (&residual_route - &conjugate_route).norm();
    if gap > 1e-10 * (1.0 + conjugate_route.norm()) {
        return Err(Error::ArithmeticMismatch {
            what: "Moreau envelope gradient",
            residual: gap,
        });
    }
    Ok(conjugate_route)
}

/// `argmin_p { M_{λh*}(p) + (σ/2)‖p − v‖² }` in closed form:
/// `(λσ·v + prox_{(λ+1/σ)h*}(v)) / (λσ + 1)`.
pub fn prox_of_moreau_env(h: &ProxFamily, lambda: f64, sigma: f64, v: &Dual) -> Dual {
    let ls = lambda * sigma;
    (v * ls + prox_h_conj(h, v, lambda + 1.0 / sigma)) / (ls + 1.0)
}
