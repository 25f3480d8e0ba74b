use crate::error::{Error, Result};
use crate::linalg::{frob_dot, Mat};
use crate::manifold::{retract, ManifoldPoint, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig {
    pub c1: f64,
    pub eta: f64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub zeta_init: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        LineSearchConfig {
            c1: 1e-4,
            eta: 0.1,
            zeta_min: 1e-10,
            zeta_max: 1e2,
            zeta_init: 1e-3,
            max_backtracks: 60,
        }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return bad("c1", "must lie in (0, 1)");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad("eta", "must lie in (0, 1)");
        }
        if !(self.zeta_min > 0.0 && self.zeta_min < self.zeta_max && self.zeta_max.is_finite()) {
            return bad("zeta", "need 0 < zeta_min < zeta_max < inf");
        }
        if !(self.zeta_init >= self.zeta_min) {
            return bad("zeta_init", "must be at least zeta_min");
        }
        Ok(())
    }
}

/// An accepted backtracking step together with whatever the merit
/// evaluation produced at the new point.
#[derive(Debug, Clone)]
pub struct Accepted<E> {
    pub x: ManifoldPoint,
    pub value: f64,
    pub extra: E,
    pub step: f64,
    pub backtracks: usize,
    /// `rhs − lhs` of the acceptance test.
    pub slack: f64,
}

/// Smallest `j ≥ 0` with
/// `φ(R_x(−ζηʲ g)) − φ(x) ≤ −c1 ζηʲ ‖g‖² + allowance`.
///
/// `merit` returns the trial value, its change from `φ(x)` and any extra
/// output. The change is taken from the closure so that callers can compute
/// it without cancellation.
pub fn backtrack<E>(
    ls: &LineSearchConfig,
    x: &ManifoldPoint,
    value: f64,
    g: &TangentVector,
    zeta: f64,
    allowance: f64,
    mut merit: impl FnMut(&ManifoldPoint) -> (f64, f64, E),
) -> Result<Accepted<E>> {
    let gn2 = g.matrix().norm_squared();
    let mut step = zeta;
    let mut last = f64::NAN;
    for j in 0..=ls.max_backtracks {
        let trial = retract(x, &g.scaled(-step))?;
        let (v, lhs, extra) = merit(&trial);
        let rhs = -ls.c1 * step * gn2 + allowance;
        if lhs <= rhs {
            return Ok(Accepted {
                x: trial,
                value: v,
                extra,
                step,
                backtracks: j,
                slack: rhs - lhs,
            });
        }
        last = v;
        step *= ls.eta;
    }
    Err(Error::LineSearchFailure {
        backtracks: ls.max_backtracks,
        grad_norm: libm::sqrt(gn2),
        step: step / ls.eta,
        phi_start: value,
        phi_trial: last,
    })
}

/// Raw alternating Barzilai-Borwein stepsize for step index `t`:
/// `‖s‖²/|⟨s,v⟩|` for odd `t`, `|⟨s,v⟩|/‖v‖²` for even `t`.
pub fn bb_raw(t: usize, s: &Mat, v: &Mat) -> f64 {
    let sv = frob_dot(s, v).abs();
    if t % 2 == 1 {
        s.norm_squared() / sv
    } else {
        sv / v.norm_squared()
    }
}

/// BB stepsize clipped to `[ζ_min, ζ_max/‖g‖]`; degenerate quotients fall
/// back to `ζ_max`.
pub fn bb_safeguarded(ls: &LineSearchConfig, t: usize, s: &Mat, v: &Mat, grad_norm: f64) -> f64 {
    let raw = bb_raw(t, s, v);
    let raw = if raw.is_finite() && raw > 0.0 { raw } else { ls.zeta_max };
    raw.min(ls.zeta_max / grad_norm).max(ls.zeta_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{random_point, tangent_project, ManifoldDescriptor};
    use crate::problem::testing::gaussian;

    #[test]
    fn bb_formulas() {
        let s = Mat::from_column_slice(2, 1, &[1.0, 0.0]);
        let v = Mat::from_column_slice(2, 1, &[2.0, 0.0]);
        assert_eq!(bb_raw(1, &s, &v), 0.5);
        assert_eq!(bb_raw(2, &s, &v), 0.5);
        let ls = LineSearchConfig::default();
        assert_eq!(bb_safeguarded(&ls, 1, &s, &v, 1e3), 0.1);
        assert_eq!(bb_safeguarded(&ls, 1, &s, &Mat::zeros(2, 1), 1.0), 1e2);
        assert_eq!(bb_safeguarded(&ls, 2, &s, &Mat::from_column_slice(2, 1, &[1e20, 0.0]), 1.0), 1e-10);
    }

    #[test]
    fn zero_gradient_accepts_immediately() {
        let desc = ManifoldDescriptor::stiefel(4, 2).unwrap();
        let x = random_point(desc, 1);
        let g = TangentVector(Mat::zeros(4, 2));
        let out = backtrack(&LineSearchConfig::default(), &x, 3.0, &g, 1.0, 0.0, |_| (3.0, 0.0, ())).unwrap();
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.x.basis(), x.basis());
    }

    #[test]
    fn quadratic_merit_backtracks_then_accepts() {
        let desc = ManifoldDescriptor::stiefel(5, 2).unwrap();
        let c = gaussian(5, 2, 3);
        let x = random_point(desc, 4);
        let v0 = -crate::linalg::frob_dot(x.basis(), &c);
        let merit = |z: &ManifoldPoint| {
            let v = -crate::linalg::frob_dot(z.basis(), &c);
            (v, v - v0, ())
        };
        let g = tangent_project(&x, &-&c).unwrap();
        let ls = LineSearchConfig::default();
        let out = backtrack(&ls, &x, v0, &g, 1e2, 0.0, merit).unwrap();
        assert!(out.slack >= 0.0);
        assert!(out.value < v0);
        // A merit that only tolerates tiny moves forces backtracking.
        let x0 = x.clone();
        let picky = |z: &ManifoldPoint| {
            let v = (z.basis() - x0.basis()).norm() - 1e-3;
            (v, v, ())
        };
        let out = backtrack(&ls, &x, 0.0, &g, 1.0, 0.0, picky).unwrap();
        assert!(out.backtracks > 0);
        assert!(out.slack >= 0.0);
    }

    #[test]
    fn failure_reports_diagnostics() {
        let desc = ManifoldDescriptor::stiefel(3, 1).unwrap();
        let x = random_point(desc, 5);
        let g = tangent_project(&x, &gaussian(3, 1, 6)).unwrap();
        let ls = LineSearchConfig {
            max_backtracks: 3,
            ..LineSearchConfig::default()
        };
        let err = backtrack(&ls, &x, 0.0, &g, 1.0, 0.0, |_| (1.0, 1.0, ())).unwrap_err();
        assert!(matches!(err, Error::LineSearchFailure { backtracks: 3, .. }));
    }
}
