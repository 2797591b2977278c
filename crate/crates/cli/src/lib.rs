//! Command-line surface for the fractional oscillation toolkit: declarative
//! problem specs, CSV/SVG emission, built-in reproduction runs, and verdict
//! reports.

// Validation uses `!(x > 0.0)` so NaN inputs fail alongside range errors.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod commands;
pub mod csvio;
pub mod spec;
pub mod svg;

/// Exit code conventions: 0 success, 1 spec/configuration errors,
/// 2 numerical failure (blow-up or non-convergence) with truncated outputs.
pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC_ERROR: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
