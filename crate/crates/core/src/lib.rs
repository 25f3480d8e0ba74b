//! Riemannian alternating descent ascent for nonconvex-linear minimax
//! problems on Stiefel and Grassmann manifolds, with baseline solvers.
#![no_std]
// `!(x > 0.0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod convex;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod problem;

pub use error::{Error, Result};
pub mod rada;
pub mod report;
