//! Core fractional operators on sampled functions.
//!
//! `rl_integral` and `caputo_l1` discretize the Riemann-Liouville integral and
//! the Caputo derivative with product-trapezoidal / L1 rules on a uniform
//! grid; `caputo_marchaud` evaluates higher-order Caputo derivatives through
//! the boundary-term-plus-singular-integral representation. Weight tables are
//! stationary in the node offset, so storage is O(N) while application stays
//! O(N^2).

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Grid, SampledFn};
use statrs::function::gamma::gamma;

/// Caputo initial data `x(0), x'(0), ..., x^(n-1)(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    derivs: Vec<f64>,
}

impl InitialData {
    pub fn new(derivs: Vec<f64>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(Error::InvalidInput("initial data must not be empty".into()));
        }
        if let Some(i) = derivs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: i,
                context: "initial data",
            });
        }
        Ok(InitialData { derivs })
    }

    pub fn len(&self) -> usize {
        self.derivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivs.is_empty()
    }

    /// `x^(k)(0)`.
    pub fn deriv(&self, k: usize) -> f64 {
        self.derivs[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.derivs
    }

    /// Copy with the zeroth entry shifted by `delta`.
    pub fn with_shifted_value(&self, delta: f64) -> Self {
        let mut derivs = self.derivs.clone();
        derivs[0] += delta;
        InitialData { derivs }
    }
}

/// Product-trapezoidal weights for the kernel `(t - s)^(mu - 1) / Gamma(mu)`.
///
/// `sum_j w[i][j] u_j` integrates the piecewise-linear interpolant of `u`
/// against the kernel exactly, so row `i` sums to `t_i^mu / Gamma(mu + 1)`.
/// Only the stationary interior sequence and the `j = 0` boundary column are
/// stored.
#[derive(Debug, Clone)]
pub struct ConvWeights {
    mu: f64,
    factor: f64,
    /// `interior[d]`, `d >= 1`: scaled weight at offset `d = i - j` for
    /// `1 <= j <= i - 1`. `interior[0]` is the diagonal weight (always 1).
    interior: Vec<f64>,
    /// `boundary[i]`: scaled weight of node 0 in row `i` (index 0 unused).
    boundary: Vec<f64>,
}

impl ConvWeights {
    pub fn new(mu: f64, grid: &Grid) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                msg: format!("kernel exponent must be positive, got {mu}"),
            });
        }
        let n = grid.n_steps();
        let factor = grid.h().powf(mu) / gamma(mu + 2.0);
        let mut interior = Vec::with_capacity(n);
        interior.push(1.0);
        for d in 1..n {
            let d = d as f64;
            interior
                .push((d + 1.0).powf(mu + 1.0) + (d - 1.0).powf(mu + 1.0) - 2.0 * d.powf(mu + 1.0));
        }
        let mut boundary = Vec::with_capacity(n + 1);
        boundary.push(0.0);
        for i in 1..=n {
            let i = i as f64;
            boundary.push((i - 1.0).powf(mu + 1.0) - (i - mu - 1.0) * i.powf(mu));
        }
        Ok(ConvWeights {
            mu,
            factor,
            interior,
            boundary,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Weight `w[i][j]` for `j <= i`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i && i < self.boundary.len());
        if i == 0 {
            return 0.0;
        }
        let scaled = if j == 0 {
            self.boundary[i]
        } else {
            self.interior[i - j]
        };
        self.factor * scaled
    }

    /// Diagonal weight `w[i][i]`, `i >= 1`.
    pub fn diagonal(&self) -> f64 {
        self.factor
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let terms: Vec<f64> = (0..=i).map(|j| self.weight(i, j)).collect();
        pairwise_sum(&terms)
    }

    /// `sum_{j=0}^{i} w[i][j] u_j`.
    pub fn convolve_row(&self, i: usize, u: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend((0..=i).map(|j| self.weight(i, j) * u[j]));
        pairwise_sum(scratch)
    }

    /// History part `sum_{j=0}^{i-1} w[i][j] u_j` (diagonal excluded).
    pub fn convolve_history(&self, i: usize, u: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend((0..i).map(|j| self.weight(i, j) * u[j]));
        pairwise_sum(scratch)
    }

    /// Apply the full triangular table to a sample vector.
    pub fn apply(&self, u: &SampledFn) -> Result<SampledFn> {
        let n = u.grid().n_steps();
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        let mut scratch = Vec::with_capacity(n + 1);
        for i in 1..=n {
            let v = self.convolve_row(i, u.values(), &mut scratch);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: i,
                    context: "convolution",
                });
            }
            out.push(v);
        }
        SampledFn::new(*u.grid(), out)
    }
}

/// Riemann-Liouville fractional integral `I^alpha u` on the grid of `u`.
///
/// The value at `t = 0` is zero.
pub fn rl_integral(u: &SampledFn, alpha: f64) -> Result<SampledFn> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            msg: format!("integration order must be positive, got {alpha}"),
        });
    }
    ConvWeights::new(alpha, u.grid())?.apply(u)
}

/// Caputo derivative of order `alpha` in `(0, 1)` by the L1 scheme.
///
/// Piecewise-constant slopes of `u` are integrated against `(t - s)^-alpha`;
/// the value at `t = 0` is defined as zero. Inputs are assumed to sample an
/// absolutely continuous function; no smoothness detection is attempted.
pub fn caputo_l1(u: &SampledFn, alpha: f64) -> Result<SampledFn> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            msg: format!("L1 scheme needs alpha in (0, 1), got {alpha} (use caputo_marchaud for higher orders)"),
        });
    }
    let grid = *u.grid();
    let n = grid.n_steps();
    let q = 1.0 - alpha;
    // d[k] = (k+1)^(1-alpha) - k^(1-alpha), the kernel integral over one panel.
    let d: Vec<f64> = (0..n)
        .map(|k| ((k + 1) as f64).powf(q) - (k as f64).powf(q))
        .collect();
    let scale = grid.h().powf(-alpha) / gamma(2.0 - alpha);
    let slopes: Vec<f64> = u.values().windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut scratch = Vec::with_capacity(n);
    for i in 1..=n {
        scratch.clear();
        scratch.extend((0..i).map(|j| slopes[j] * d[i - 1 - j]));
        let v = scale * pairwise_sum(&scratch);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "caputo_l1",
            });
        }
        out.push(v);
    }
    SampledFn::new(grid, out)
}

/// Caputo derivative of order `alpha` in `(n-1, n)` from samples of the
/// `(n-1)`-st derivative.
///
/// Evaluates the representation `Gamma(n-alpha)^-1 [ (v(t) - v(0)) /
/// t^(alpha-n+1) + (alpha-n+1) * integral of (v(t) - v(s)) / (t-s)^(alpha-n+2) ]`
/// with `v = x^(n-1)`. The difference in the numerator is interpolated
/// linearly, which keeps the last panel finite without a singularity cutoff.
pub fn caputo_marchaud_from_deriv(v: &SampledFn, v0: f64, alpha: f64) -> Result<SampledFn> {
    let n_order = alpha.ceil();
    if !alpha.is_finite() || alpha <= 0.0 || (alpha - alpha.round()).abs() < 1e-12 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            msg: format!("Marchaud route needs a non-integer positive order, got {alpha}"),
        });
    }
    if !v0.is_finite() {
        return Err(Error::InvalidInput("v(0) must be finite".into()));
    }
    let grid = *v.grid();
    let h = grid.h();
    let n = grid.n_steps();
    let rho = alpha - n_order + 2.0; // kernel exponent, in (1, 2)
    let q = 1.0 - rho; // in (-1, 0)
    let h_pow = h.powf(q);

    // Per-panel moments of tau^-rho against the linear hat functions, offset
    // p = i - j >= 1. left[p] weights the node at the panel's left end (larger
    // tau side is p, smaller is p-1).
    let mut left = Vec::with_capacity(n + 1);
    let mut right = Vec::with_capacity(n + 1);
    left.push(0.0);
    right.push(0.0);
    for p in 1..=n {
        let pf = p as f64;
        let i1 = (pf.powf(q + 1.0) - (pf - 1.0).powf(q + 1.0)) / (q + 1.0);
        if p == 1 {
            left.push(h_pow * i1);
            right.push(0.0); // unused: the right node of the last panel carries v(t_i) - v(t_i) = 0
        } else {
            let i0 = (pf.powf(q) - (pf - 1.0).powf(q)) / q;
            left.push(h_pow * (i1 - (pf - 1.0) * i0));
            right.push(h_pow * (pf * i0 - i1));
        }
    }

    let gamma_na = gamma(n_order - alpha);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut scratch = Vec::with_capacity(n + 1);
    let vs = v.values();
    for i in 1..=n {
        let t = grid.node(i);
        let vi = vs[i];
        scratch.clear();
        // g_j = v(t_i) - v(t_j); node j collects the left weight of panel j
        // and the right weight of panel j-1.
        scratch.push((vi - vs[0]) * left[i]);
        for j in 1..i {
            scratch.push((vi - vs[j]) * (left[i - j] + right[i - j + 1]));
        }
        let integral = pairwise_sum(&scratch);
        let boundary = (vi - v0) / t.powf(alpha - n_order + 1.0);
        let val = (boundary + (alpha - n_order + 1.0) * integral) / gamma_na;
        if !val.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "caputo_marchaud",
            });
        }
        out.push(val);
    }
    SampledFn::new(grid, out)
}

/// Caputo derivative of non-integer order `alpha > 0` from samples of `u`.
///
/// The `(n-1)`-st derivative is produced by repeated fourth-order finite
/// differences; its exact value at 0 comes from the supplied initial data.
pub fn caputo_marchaud(u: &SampledFn, ic: &InitialData, alpha: f64) -> Result<SampledFn> {
    if !alpha.is_finite() || alpha <= 0.0 || (alpha - alpha.round()).abs() < 1e-12 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            msg: format!("order must be positive and non-integer, got {alpha}"),
        });
    }
    let n_order = alpha.ceil() as usize;
    if ic.len() < n_order {
        return Err(Error::InvalidInput(format!(
            "order {alpha} needs {n_order} initial derivatives, got {}",
            ic.len()
        )));
    }
    let mut v = u.clone();
    for _ in 0..n_order - 1 {
        v = derivative_4th_order(&v)?;
    }
    caputo_marchaud_from_deriv(&v, ic.deriv(n_order - 1), alpha)
}

/// First derivative by fourth-order central differences, one-sided stencils
/// at the boundary. Requires at least 5 nodes.
pub fn derivative_4th_order(u: &SampledFn) -> Result<SampledFn> {
    let grid = *u.grid();
    let n = grid.n_nodes();
    if n < 5 {
        return Err(Error::InvalidInput(
            "fourth-order differentiation needs at least 5 nodes".into(),
        ));
    }
    let s = u.values();
    let d = 12.0 * grid.h();
    let mut out = Vec::with_capacity(n);
    out.push((-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / d);
    out.push((-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]) / d);
    for i in 2..n - 2 {
        out.push((s[i - 2] - 8.0 * s[i - 1] + 8.0 * s[i + 1] - s[i + 2]) / d);
    }
    let m = n - 1;
    out.push((3.0 * s[m] + 10.0 * s[m - 1] - 18.0 * s[m - 2] + 6.0 * s[m - 3] - s[m - 4]) / d);
    out.push(
        (25.0 * s[m] - 48.0 * s[m - 1] + 36.0 * s[m - 2] - 16.0 * s[m - 3] + 3.0 * s[m - 4]) / d,
    );
    SampledFn::new(grid, out)
}

/// Taylor polynomial `sum_k x_k t^k / k!` sampled on the grid.
pub fn taylor_poly(ic: &InitialData, grid: &Grid) -> Result<SampledFn> {
    let mut values = Vec::with_capacity(grid.n_nodes());
    for t in grid.times() {
        let mut term = 1.0;
        let mut acc = 0.0;
        for (k, &c) in ic.values().iter().enumerate() {
            if k > 0 {
                term *= t / k as f64;
            }
            acc += c * term;
        }
        values.push(acc);
    }
    SampledFn::new(*grid, values)
}

/// Slack in the Young-type inequality of the two-parameter bound
/// `lambda X Y^(lambda-1) - X^lambda {<=, >=} (lambda - 1) Y^lambda`.
///
/// Returns `(lambda-1) Y^lambda - (lambda X Y^(lambda-1) - X^lambda)` for
/// `lambda > 1` and the negated difference for `lambda < 1`; both are
/// nonnegative whenever the inequality holds.
pub fn young_gap(x: f64, y: f64, lambda: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            msg: format!("needs X >= 0, got {x}"),
        });
    }
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::InvalidParameter {
            name: "y",
            msg: format!("needs Y > 0, got {y}"),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) || lambda == 1.0 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            msg: format!("needs lambda > 0, lambda != 1, got {lambda}"),
        });
    }
    let lhs = lambda * x * y.powf(lambda - 1.0) - x.powf(lambda);
    let rhs = (lambda - 1.0) * y.powf(lambda);
    Ok(if lambda > 1.0 { rhs - lhs } else { lhs - rhs })
}
