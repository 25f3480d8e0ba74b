//! Experiment runner, metrics, persistence and command line for `rada-core`.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod output;
pub mod presets;
pub mod selftest;

pub use error::{HarnessError, Result};
