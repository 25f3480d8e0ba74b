//! Run bookkeeping shared by RADA and the baseline solvers.

use alloc::vec::Vec;

use crate::linalg::{Dual, Mat};
use crate::manifold::ManifoldPoint;

/// Source of elapsed time. The core crate has no clock of its own.
pub trait Clock {
    fn elapsed_seconds(&self) -> f64;
}

/// A clock that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

/// One outer iteration, measured at the iterate the iteration started from.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `Φ(x_k)`.
    pub phi: f64,
    /// The solver's merit at `x_k`: `Φ_k` for RADA, the line-search merit otherwise.
    pub merit: f64,
    pub grad_norm: f64,
    pub delta: Option<f64>,
    pub beta: Option<f64>,
    /// Line-search allowance per outer iteration.
    pub nu: f64,
    pub inner_steps: usize,
    pub backtracks: usize,
    pub elapsed: f64,
}

/// ε-RGS residuals at a primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgsCertificate {
    pub pass: bool,
    pub g_res: f64,
    pub y_res: f64,
}

/// ε-ROS residuals at a primal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosCertificate {
    pub pass: bool,
    pub g_res: f64,
    pub p_res: f64,
}

/// Worst cases of the run-time identity checks, collected when enabled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Max gap between the two evaluation routes of `Φ_k`, relative to the
    /// magnitude of the terms.
    pub value_route_gap: f64,
    /// Max `‖grad Φ_k(x_k) − grad_x F(x_k, y_{k+1/2})‖`, envelope route vs
    /// prox route, divided by the envelope route's conditioning factor
    /// `max(1, ‖A(x_k) + β_k y_k‖_∞/(λ+β_k))`.
    pub gradient_identity_gap: f64,
    /// Max gap between the dual and primal forms of `δ`.
    pub delta_route_gap: f64,
    /// Min of `rhs − lhs` over accepted Armijo steps.
    pub min_armijo_slack: f64,
    /// Min of `Φ_k(x_t) − Φ_k(x_{t+1})` over projected-gradient steps.
    pub min_descent_slack: f64,
    pub max_dual_infeasibility: f64,
    /// Max of `β_k − β1/k^ρ`.
    pub max_beta_excess: f64,
    /// Max of `Φ_{k+1}(x_{k+1}) − Φ_k(x_k) − ν_k − 2β_kR²`.
    pub max_decrease_excess: f64,
    /// Max first-order residual of the exact `p`-step (splitting methods).
    pub max_p_step_residual: f64,
    /// Iterations whose line search failed and left `x` in place. Counted
    /// whether or not diagnostics are enabled.
    pub null_steps: usize,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics {
            value_route_gap: 0.0,
            gradient_identity_gap: 0.0,
            delta_route_gap: 0.0,
            min_armijo_slack: f64::INFINITY,
            min_descent_slack: f64::INFINITY,
            max_dual_infeasibility: 0.0,
            max_beta_excess: f64::NEG_INFINITY,
            max_decrease_excess: f64::NEG_INFINITY,
            max_p_step_residual: 0.0,
            null_steps: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: &'static str,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
    pub elapsed: f64,
    /// RGS residuals at the last probed pair.
    pub rgs: RgsCertificate,
    /// ROS residuals at the final point.
    pub ros: RosCertificate,
    pub x: ManifoldPoint,
    pub y: Dual,
    /// `Φ` at the final point.
    pub phi: f64,
    pub diagnostics: Diagnostics,
    /// `(x_k, y_k)` for `k = 1, 2, …`, when requested.
    pub trajectory: Vec<(Mat, Dual)>,
}
