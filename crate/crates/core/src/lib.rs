//! Numerical engine for multi-term Caputo fractional differential equations.
//!
//! The crate is organized around [`SampledFn`], a real-valued function sampled
//! on a uniform time mesh anchored at t = 0. On top of that currency it
//! provides:
//!
//! - [`fracops`]: Riemann-Liouville integrals, Caputo derivatives (L1 and
//!   Marchaud-type evaluation routes), Taylor polynomials, and the
//!   product-integration weight tables behind them.
//! - [`solver`]: a predictor-corrector scheme for the multi-term Caputo
//!   initial value problem via its Volterra integral reformulation.
//! - [`kernel`]: evaluation of the relaxation kernel
//!   `L^-1(s^(kappa-1) / (s^alpha + a s^beta + b))` by fixed-Talbot numerical
//!   Laplace inversion, with decay-bound and convolution diagnostics.
//! - [`oscillation`]: zero-crossing detection, weighted forcing transforms,
//!   finite-horizon trend checks for the oscillation conditions, and envelope
//!   decay-rate estimation.
//! - [`comparison`]: numerical sub/supersolution certificates and the
//!   monotone family of solutions obtained by bumping the initial value.
//! - [`reduction`]: the change of variables turning a higher-order two-term
//!   equation into a first-order chain, with sign-pattern and tail-decay
//!   classifiers.

// Validation deliberately uses `!(x > 0.0)` so that NaN parameters are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod error;
pub mod fracops;
pub mod grid;
pub mod kernel;
pub mod oscillation;
pub mod reduction;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{Grid, SampledFn};

use std::sync::Arc;

/// Scalar function of time, shared across problem definitions.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Right-hand side `f(t, x)` of a fractional differential equation.
pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
