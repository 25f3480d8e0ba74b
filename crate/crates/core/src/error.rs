use thiserror::Error;

/// Failure modes shared by every solver and oracle in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("point is not on the manifold (orthonormality residual {residual:e})")]
    Infeasible { residual: f64 },
    #[error("degenerate retraction step: QR pivot {pivot:e} below tolerance")]
    DegenerateStep { pivot: f64 },
    #[error("degenerate manifold projection: gap {gap:e} below tolerance")]
    DegenerateProjection { gap: f64 },
    #[error("arithmetic mismatch in {what}: two evaluation routes differ by {residual:e}")]
    ArithmeticMismatch { what: &'static str, residual: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),
    #[error(
        "line search failed after {backtracks} backtracks \
         (|grad| = {grad_norm:e}, step = {step:e}, phi = {phi_start}, trial = {phi_trial})"
    )]
    LineSearchFailure {
        backtracks: usize,
        grad_norm: f64,
        step: f64,
        phi_start: f64,
        phi_trial: f64,
    },
    #[error("projected gradient step increased the value function by {increase:e}")]
    DescentViolation { increase: f64 },
    #[error("matrix is not symmetric (residual {residual:e})")]
    Asymmetric { residual: f64 },
    #[error("affinity row {index} sums to zero (isolated node)")]
    IsolatedNode { index: usize },
    #[error("fewer than {clusters} distinct rows available for clustering")]
    DegenerateClustering { clusters: usize },
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = core::result::Result<T, Error>;
