//! Single-loop comparison solvers: ARPGDA, DSGM, RADMM, and the
//! symmetric Gauss-Seidel ADMM form of RADA-RGD.

mod arpgda;
mod dsgm;
mod radmm;
mod sgs;

pub use arpgda::{run_arpgda, run_arpgda_timed};
pub use dsgm::{dsgm_objective, run_dsgm, run_dsgm_timed, smoothed_grad};
pub use radmm::{radmm_p_step, run_radmm, run_radmm_timed};
pub use sgs::{run_sgs_admm, run_sgs_admm_timed, sgs_p_step};

use crate::error::{Error, Result};
use crate::linalg::{Dual, Mat};
use crate::manifold::ManifoldPoint;
use crate::problem::Problem;
use crate::rada::{bb_safeguarded, Accepted, LineSearchConfig};
use crate::report::{Clock, NoClock, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Arpgda,
    Dsgm,
    Radmm,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Arpgda => "arpgda",
            Baseline::Dsgm => "dsgm",
            Baseline::Radmm => "radmm",
        }
    }
}

/// `coef · k^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power {
    pub coef: f64,
    pub exponent: f64,
}

impl Power {
    pub fn at(&self, k: usize) -> f64 {
        self.coef * libm::pow(k as f64, self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub algorithm: Baseline,
    /// Accuracy used for the default `λ = ε/(2R)` and the final certificates.
    pub eps: f64,
    pub lambda: Option<f64>,
    /// ARPGDA dual proximal weight `β_k`.
    pub beta: Power,
    /// DSGM and RADMM smoothing `λ_k`.
    pub smoothing: Power,
    /// RADMM penalty `σ_k`.
    pub sigma: Power,
    pub line_search: LineSearchConfig,
    pub gamma: f64,
    pub phi_tol: f64,
    pub window: usize,
    pub max_iters: usize,
    pub log_every: usize,
    pub diagnostics: bool,
    pub record_trajectory: bool,
}

impl BaselineConfig {
    pub fn new(algorithm: Baseline, eps: f64) -> Self {
        BaselineConfig {
            algorithm,
            eps,
            lambda: None,
            beta: Power {
                coef: 1.0,
                exponent: -1.5,
            },
            smoothing: Power {
                coef: 10.0,
                exponent: -1.0 / 3.0,
            },
            sigma: Power {
                coef: 1e-7,
                exponent: 1.5,
            },
            line_search: LineSearchConfig::default(),
            gamma: 1.0,
            phi_tol: 1e-8,
            window: 1000,
            max_iters: 20_000,
            log_every: 1,
            diagnostics: false,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.eps > 0.0) {
            return bad("eps", "must be positive");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return bad("lambda", "must be positive and finite");
            }
        }
        if !(self.beta.coef >= 0.0 && self.beta.coef.is_finite() && self.beta.exponent.is_finite()) {
            return bad("beta", "coefficient must be nonnegative and finite");
        }
        if !(self.smoothing.coef > 0.0 && self.smoothing.coef.is_finite() && self.smoothing.exponent.is_finite()) {
            return bad("smoothing", "coefficient must be positive and finite");
        }
        if !(self.sigma.coef > 0.0 && self.sigma.coef.is_finite() && self.sigma.exponent.is_finite()) {
            return bad("sigma", "coefficient must be positive and finite");
        }
        if !(self.gamma > 0.0) {
            return bad("gamma", "must be positive");
        }
        if !(self.phi_tol >= 0.0) {
            return bad("phi_tol", "must be nonnegative");
        }
        if self.window == 0 {
            return bad("window", "must be at least 1");
        }
        if self.log_every == 0 {
            return bad("log_every", "must be at least 1");
        }
        self.line_search.validate()
    }

    pub fn lambda_for(&self, r: f64) -> Result<f64> {
        match self.lambda {
            Some(l) => Ok(l),
            None if r > 0.0 => Ok(self.eps / (2.0 * r)),
            None => Err(Error::InvalidParameter {
                name: "lambda",
                reason: "zero dual radius needs an explicit value",
            }),
        }
    }
}

/// Whether the best value so far improved by less than `tol` over the last
/// `window` iterations. Needs `window + 1` entries before it can fire.
pub fn stop_window(history: &[f64], tol: f64, window: usize) -> bool {
    let n = history.len();
    if n <= window {
        return false;
    }
    let best_before = history[..n - window].iter().copied().fold(f64::INFINITY, f64::min);
    let best_now = history[n - window..].iter().copied().fold(best_before, f64::min);
    best_before - best_now < tol
}

/// Runs the configured single-loop baseline. DSGM ignores `y_init`.
pub fn run_baseline<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
) -> Result<RunReport> {
    run_baseline_timed(p, cfg, x_init, y_init, &NoClock)
}

pub fn run_baseline_timed<P: Problem + ?Sized>(
    p: &P,
    cfg: &BaselineConfig,
    x_init: ManifoldPoint,
    y_init: Dual,
    clock: &dyn Clock,
) -> Result<RunReport> {
    match cfg.algorithm {
        Baseline::Arpgda => run_arpgda_timed(p, cfg, x_init, y_init, clock),
        Baseline::Dsgm => run_dsgm_timed(p, cfg, x_init, clock),
        Baseline::Radmm => run_radmm_timed(p, cfg, x_init, y_init, clock),
    }
}

/// Once the predicted decrease sinks below rounding no trial step passes
/// the Armijo test. The iterate then stays put and the window stop ends
/// the stalled run.
pub(crate) fn or_stay<E>(
    res: Result<Accepted<E>>,
    x: &ManifoldPoint,
    value: f64,
    stay: impl FnOnce() -> E,
    null_steps: &mut usize,
) -> Result<Accepted<E>> {
    match res {
        Err(Error::LineSearchFailure { backtracks, .. }) => {
            *null_steps += 1;
            Ok(Accepted {
                x: x.clone(),
                value,
                extra: stay(),
                step: 0.0,
                backtracks,
                // No acceptance test was passed, so nothing enters the slack minimum.
                slack: f64::INFINITY,
            })
        }
        other => other,
    }
}

/// Alternating BB stepsize fed by successive iterates and search directions.
pub(crate) struct BbMemory {
    pub zeta: f64,
    count: usize,
}

impl BbMemory {
    pub fn new(ls: &LineSearchConfig) -> Self {
        BbMemory {
            zeta: ls.zeta_init,
            count: 0,
        }
    }

    /// Refreshes `ζ` from an accepted step `x → x_next`. Both gradients must
    /// belong to the objective of the iteration that took the step: pairing
    /// gradients of successive objectives lets the drift of the objective
    /// swamp `v` once the iterates slow down.
    pub fn update(&mut self, ls: &LineSearchConfig, x: &Mat, g: &Mat, x_next: &Mat, g_next: &Mat) {
        self.count += 1;
        self.zeta = bb_safeguarded(ls, self.count, &(x_next - x), &(g_next - g), g_next.norm());
    }
}

/// `Σ_i (a'_i − a_i) w_i` with the differences formed first.
pub(crate) fn linear_change(a_new: &Dual, a_old: &Dual, w: &Dual) -> f64 {
    let mut s = 0.0;
    for i in 0..w.len() {
        s += (a_new[i] - a_old[i]) * w[i];
    }
    s
}

#[cfg(test)]
mod tests;
