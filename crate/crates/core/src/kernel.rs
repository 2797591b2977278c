//! Relaxation kernel `G^kappa(t) = L^-1( s^(kappa-1) / (s^alpha + a s^beta + b) )`
//! by fixed-Talbot numerical Laplace inversion, plus the decay-bound and
//! forced-convolution diagnostics built on it.
//!
//! The contour is `s(theta) = r theta (cot theta + i)`, `theta in (-pi, pi)`,
//! with `r = scale / t`. Keeping `scale` fixed (instead of growing it with
//! the node count) bounds the `exp(r t) = exp(scale)` rounding amplification,
//! so doubling the node count converges to the same value instead of
//! amplifying noise. The denominator has no zeros off the negative real axis
//! for the admissible parameter range, so no pole handling is needed.

use crate::error::{Error, Result};
use crate::grid::SampledFn;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which numerator power `s^(kappa-1)` the kernel carries; tied to the other
/// parameters, so stored symbolically and resolved at evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kappa {
    Alpha,
    Beta,
    One,
}

/// Parameters `(kappa, alpha, beta, a, b)` of the kernel, restricted to
/// `0 < beta < alpha <= 1` and `a, b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub kappa: Kappa,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl KernelParams {
    pub fn new(kappa: Kappa, alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if !(0.0 < beta && beta < alpha && alpha <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha/beta",
                msg: format!("need 0 < beta < alpha <= 1, got alpha = {alpha}, beta = {beta}"),
            });
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "a/b",
                msg: format!("need positive a, b; got a = {a}, b = {b}"),
            });
        }
        Ok(KernelParams {
            kappa,
            alpha,
            beta,
            a,
            b,
        })
    }

    fn kappa_value(&self) -> f64 {
        match self.kappa {
            Kappa::Alpha => self.alpha,
            Kappa::Beta => self.beta,
            Kappa::One => 1.0,
        }
    }

    /// Laplace-domain symbol with principal-branch powers.
    fn transform(&self, s: Complex64) -> Complex64 {
        let numer = s.powf(self.kappa_value() - 1.0);
        let denom = s.powf(self.alpha) + self.a * s.powf(self.beta) + self.b;
        numer / denom
    }
}

/// Contour discretization: node count (even, at least 16) and the fixed
/// contour scale; `r = scale / t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalbotConfig {
    pub n_nodes: usize,
    pub scale: f64,
}

impl Default for TalbotConfig {
    fn default() -> Self {
        // scale 12 keeps exp(scale) rounding amplification near 1e-11 while
        // the 48-node trapezoid is already converged; measured 48-vs-96
        // agreement is ~1e-9 relative over t in [0.01, 200].
        TalbotConfig {
            n_nodes: 48,
            scale: 12.0,
        }
    }
}

impl TalbotConfig {
    fn validate(&self) -> Result<()> {
        if self.n_nodes < 16 || !self.n_nodes.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "n_nodes",
                msg: format!(
                    "need an even node count of at least 16, got {}",
                    self.n_nodes
                ),
            });
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                msg: format!("contour scale must be positive, got {}", self.scale),
            });
        }
        Ok(())
    }
}

/// Evaluate the kernel at one time by the fixed-Talbot rule.
pub fn g_eval(p: &KernelParams, t: f64, cfg: &TalbotConfig) -> Result<f64> {
    cfg.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "the kernel is evaluated for t > 0 only, got {t}"
        )));
    }
    let m = cfg.n_nodes;
    let r = cfg.scale / t;
    // theta = 0 endpoint: s = r, s' = i r, and the transform is real там.
    let mut acc = 0.5 * r * (r * t).exp() * p.transform(Complex64::new(r, 0.0)).re;
    if !acc.is_finite() {
        return Err(Error::Inversion {
            t,
            msg: "non-finite endpoint contribution at theta = 0".into(),
        });
    }
    for j in 1..m {
        let theta = j as f64 * PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let ds = Complex64::new(r * (cot - theta / theta.sin().powi(2)), r);
        let term = ((s * t).exp() * p.transform(s) * ds).im;
        if !term.is_finite() {
            return Err(Error::Inversion {
                t,
                msg: format!("non-finite contribution at contour node {j} of {m}"),
            });
        }
        acc += term;
    }
    Ok(acc / m as f64)
}

/// Empirical sups of `t^(1-alpha) |G^1|` on a low range inside `(0, 1)` and
/// `t^(1+beta) |G^1|` on a high range inside `[1, inf)`, with the arg-sup
/// points. Sampling is logarithmic in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub low_sup: f64,
    pub low_argsup: f64,
    pub high_sup: f64,
    pub high_argsup: f64,
}

pub fn bound_report(
    p: &KernelParams,
    low_range: (f64, f64),
    high_range: (f64, f64),
    samples: usize,
    cfg: &TalbotConfig,
) -> Result<BoundReport> {
    if !(0.0 < low_range.0 && low_range.0 <= low_range.1 && low_range.1 <= 1.0) {
        return Err(Error::Config(format!(
            "low range ({}, {}) must lie inside (0, 1]",
            low_range.0, low_range.1
        )));
    }
    if !(1.0 <= high_range.0 && high_range.0 <= high_range.1) {
        return Err(Error::Config(format!(
            "high range ({}, {}) must lie inside [1, inf)",
            high_range.0, high_range.1
        )));
    }
    let (low_sup, low_argsup) = weighted_sup(p, low_range, samples, 1.0 - p.alpha, cfg)?;
    let (high_sup, high_argsup) = weighted_sup(p, high_range, samples, 1.0 + p.beta, cfg)?;
    Ok(BoundReport {
        low_sup,
        low_argsup,
        high_sup,
        high_argsup,
    })
}

fn weighted_sup(
    p: &KernelParams,
    range: (f64, f64),
    samples: usize,
    weight_pow: f64,
    cfg: &TalbotConfig,
) -> Result<(f64, f64)> {
    let n = samples.max(1);
    let mut sup = f64::NEG_INFINITY;
    let mut arg = range.0;
    for k in 0..n {
        let t = if n == 1 || range.0 == range.1 {
            range.0
        } else {
            let frac = k as f64 / (n - 1) as f64;
            range.0 * (range.1 / range.0).powf(frac)
        };
        let v = t.powf(weight_pow) * g_eval(p, t, cfg)?.abs();
        if v > sup {
            sup = v;
            arg = t;
        }
    }
    Ok((sup, arg))
}

/// Convolution `int_0^t G^1(t - s) g(s) ds` on the grid of `g`.
///
/// Kernel values are taken at midpoint-regularized offsets `(d - 1/2) h`;
/// the singular first panel uses the weak-singularity weight with exponent
/// `alpha` (the kernel behaves like `t^(alpha-1)` near zero), calibrated by
/// one kernel evaluation at the panel midpoint.
pub fn forced_convolution(
    p: &KernelParams,
    g: &SampledFn,
    cfg: &TalbotConfig,
) -> Result<SampledFn> {
    let grid = *g.grid();
    let h = grid.h();
    if h >= 1.0 {
        return Err(Error::Config(format!(
            "grid step {h} is too coarse for the kernel's t -> 0 singularity"
        )));
    }
    let n = grid.n_steps();
    // kernel at midpoints (d - 1/2) h, d = 1..n
    let mut mid = Vec::with_capacity(n + 1);
    mid.push(0.0);
    for d in 1..=n {
        mid.push(g_eval(p, (d as f64 - 0.5) * h, cfg)?);
    }
    // singular-panel calibration: G ~ c tau^(alpha-1) with c from the midpoint
    let c_head = mid[1] / (0.5 * h).powf(p.alpha - 1.0);
    let head_w_right = c_head * h.powf(p.alpha) / p.alpha; // weight of g at tau scale
    let head_w_slope = c_head * h.powf(p.alpha) / (p.alpha + 1.0);

    let gv = g.values();
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for i in 1..=n {
        // singular panel tau in [0, h]: g(s) = g_i + (g_(i-1) - g_i) tau / h
        let mut acc = head_w_right * gv[i] + head_w_slope * (gv[i - 1] - gv[i]);
        for d in 2..=i {
            acc += mid[d] * 0.5 * (gv[i - d] + gv[i - d + 1]) * h;
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "forced convolution",
            });
        }
        out.push(acc);
    }
    SampledFn::new(grid, out)
}

/// Head-calibrated midpoint quadrature of `int_0^t_max G^1`.
pub fn integrate_g1(
    p: &KernelParams,
    t_max: f64,
    panels: usize,
    cfg: &TalbotConfig,
) -> Result<f64> {
    if !(t_max > 0.0) || panels < 2 {
        return Err(Error::Config(
            "kernel mass needs a positive horizon and at least 2 panels".into(),
        ));
    }
    let h = t_max / panels as f64;
    if h >= 1.0 {
        return Err(Error::Config(format!(
            "panel width {h} too coarse for the t -> 0 singularity"
        )));
    }
    let g_mid = g_eval(p, 0.5 * h, cfg)?;
    let c_head = g_mid / (0.5 * h).powf(p.alpha - 1.0);
    let mut acc = c_head * h.powf(p.alpha) / p.alpha;
    for d in 2..=panels {
        acc += g_eval(p, (d as f64 - 0.5) * h, cfg)? * h;
    }
    Ok(acc)
}
