//! Oscillation diagnostics: zero-crossing detection, the weighted forcing
//! transform `Gamma(alpha) t^(beta-alpha-n+1) I^alpha g`, finite-horizon
//! trend checks for the oscillation conditions, and envelope decay fitting.
//!
//! The underlying conditions quantify over `t -> infinity`; every check here
//! reports a trend verdict (SUPPORTED / INCONCLUSIVE / VIOLATED) at explicit
//! finite horizons and never claims a proof. Sign-sampling checks are
//! heuristic aids and are labeled as such in rendered reports.

use crate::error::{Error, Result};
use crate::fracops::rl_integral;
use crate::grid::{Grid, SampledFn};
use crate::TimeFn;
use statrs::function::gamma::gamma;
use std::fmt;

/// One detected sign change: the interval index and its bracketing times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub interval_index: usize,
    pub t_before: f64,
    pub t_after: f64,
}

/// Zero-crossing summary of a trace.
#[derive(Debug, Clone)]
pub struct OscillationReport {
    pub crossings: Vec<Crossing>,
    /// Sign held after the last crossing (`+1` / `-1`), if any sample left
    /// the deadband at all.
    pub eventually_signed: Option<i8>,
    /// Fitted envelope decay slope; filled in by the caller when an envelope
    /// fit was requested and possible.
    pub envelope_exponent: Option<f64>,
    pub horizon: f64,
}

impl OscillationReport {
    pub fn count(&self) -> usize {
        self.crossings.len()
    }

    /// CSV rendering, one row per crossing.
    pub fn crossings_csv(&self) -> String {
        let mut out = String::from("index,t_before,t_after\n");
        for c in &self.crossings {
            out.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                c.interval_index, c.t_before, c.t_after
            ));
        }
        out
    }
}

/// Default deadband: `1e-9 * max|u|`, suppressing sign chatter from rounding
/// at near-zero plateaus.
pub fn default_deadband(u: &SampledFn) -> f64 {
    1e-9 * u.max_abs()
}

/// Count sign changes of `u` with hysteresis.
///
/// A crossing is recorded when a sample of one sign with `|u| > deadband` is
/// followed (possibly after samples inside the band) by a sample of the other
/// sign with `|u| > deadband`; the bracketing times are those two node times.
/// `deadband = 0` is plain sign-change detection.
pub fn count_zero_crossings(u: &SampledFn, deadband: f64) -> OscillationReport {
    let deadband = deadband.max(0.0);
    let grid = u.grid();
    let mut crossings = Vec::new();
    let mut armed: Option<(i8, usize)> = None;
    for (i, &v) in u.values().iter().enumerate() {
        if v.abs() <= deadband {
            continue;
        }
        let s: i8 = if v > 0.0 { 1 } else { -1 };
        match armed {
            Some((prev, j)) if prev != s => {
                crossings.push(Crossing {
                    interval_index: j,
                    t_before: grid.node(j),
                    t_after: grid.node(i),
                });
                armed = Some((s, i));
            }
            _ => armed = Some((s, i)),
        }
    }
    OscillationReport {
        crossings,
        eventually_signed: armed.map(|(s, _)| s),
        envelope_exponent: None,
        horizon: grid.t_end(),
    }
}

/// Weighted forcing transform `Gamma(alpha) t^(beta-alpha-n+1) I^alpha g`,
/// zero at `t = 0`.
pub fn weighted_forcing(g: &SampledFn, alpha: f64, beta: f64, n: usize) -> Result<SampledFn> {
    check_weight_params(alpha, beta, n)?;
    let integral = rl_integral(g, alpha)?;
    let expo = beta - alpha - n as f64 + 1.0;
    let scale = gamma(alpha);
    let grid = *g.grid();
    let mut values = Vec::with_capacity(g.len());
    values.push(0.0);
    for i in 1..g.len() {
        values.push(scale * grid.node(i).powf(expo) * integral.value(i));
    }
    SampledFn::new(grid, values)
}

fn check_weight_params(alpha: f64, beta: f64, n: usize) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite() && beta > 0.0 && beta < alpha) {
        return Err(Error::InvalidParameter {
            name: "beta",
            msg: format!("need 0 < beta < alpha, got alpha = {alpha}, beta = {beta}"),
        });
    }
    if n == 0 || alpha > n as f64 {
        return Err(Error::InvalidParameter {
            name: "n",
            msg: format!("need alpha <= n with n >= 1, got alpha = {alpha}, n = {n}"),
        });
    }
    Ok(())
}

/// Verdict of a finite-horizon trend check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Supported,
    Inconclusive,
    Violated,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Supported => write!(f, "SUPPORTED"),
            VerdictKind::Inconclusive => write!(f, "INCONCLUSIVE"),
            VerdictKind::Violated => write!(f, "VIOLATED"),
        }
    }
}

/// Running extrema recorded at one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonExtrema {
    pub horizon: f64,
    pub running_max: f64,
    pub running_min: f64,
}

/// Trend verdict with the per-horizon numbers backing it.
#[derive(Debug, Clone)]
pub struct TrendVerdict {
    pub kind: VerdictKind,
    pub rows: Vec<HorizonExtrema>,
    pub notes: Vec<String>,
}

impl fmt::Display for TrendVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(
                f,
                "horizon {:>10.3}: running max = {:+.6e}, running min = {:+.6e}",
                row.horizon, row.running_max, row.running_min
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        write!(f, "verdict: {}", self.kind)
    }
}

fn validate_horizons(grid: &Grid, horizons: &[f64]) -> Result<()> {
    if horizons.len() < 3 {
        return Err(Error::Config(format!(
            "trend checks need at least 3 horizons, got {}",
            horizons.len()
        )));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("horizons must be strictly increasing".into()));
    }
    let end = grid.t_end() * (1.0 + 1e-12);
    if horizons.iter().any(|&h| h <= 0.0 || h > end) {
        return Err(Error::Config(format!(
            "horizons must lie in (0, {}]",
            grid.t_end()
        )));
    }
    Ok(())
}

fn extrema_rows(w: &SampledFn, horizons: &[f64]) -> Vec<HorizonExtrema> {
    let grid = w.grid();
    let mut rows = Vec::with_capacity(horizons.len());
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut i = 0usize;
    for &h in horizons {
        let end = grid.nearest_node(h);
        while i <= end {
            max = max.max(w.value(i));
            min = min.min(w.value(i));
            i += 1;
        }
        rows.push(HorizonExtrema {
            horizon: h,
            running_max: max,
            running_min: min,
        });
    }
    rows
}

fn strictly_divergent(rows: &[HorizonExtrema]) -> bool {
    rows.windows(2)
        .all(|w| w[1].running_max > w[0].running_max && w[1].running_min < w[0].running_min)
}

/// Finite-horizon proxy for the unbounded-oscillation condition on the
/// weighted forcing: SUPPORTED when the running max strictly increases and
/// the running min strictly decreases across every horizon, INCONCLUSIVE
/// otherwise. Never VIOLATED; the condition concerns `t -> infinity`.
pub fn check_condition_b(
    g: &SampledFn,
    alpha: f64,
    beta: f64,
    n: usize,
    horizons: &[f64],
) -> Result<TrendVerdict> {
    validate_horizons(g.grid(), horizons)?;
    let w = weighted_forcing(g, alpha, beta, n)?;
    let rows = extrema_rows(&w, horizons);
    let kind = if strictly_divergent(&rows) {
        VerdictKind::Supported
    } else {
        VerdictKind::Inconclusive
    };
    Ok(TrendVerdict {
        kind,
        rows,
        notes: vec!["finite-horizon proxy for limsup = +inf / liminf = -inf".into()],
    })
}

/// Structured forcing form for the derivative-of-product conditions.
#[derive(Clone)]
pub enum ForcingSpec {
    /// Plain `g(t)` with no structural decomposition.
    Raw,
    /// `g = ^C D^alpha (t+1)^sigma h(t)` with `sigma > alpha - beta + n - 1`.
    BPrime { sigma: f64, h: TimeFn },
    /// Same shape plus `h'(t) = O(t^eta)` with
    /// `alpha - beta < sigma < alpha <= 1` and `-1 < eta < alpha - sigma - 1`.
    BDoublePrime { sigma: f64, eta: f64, h: TimeFn },
}

/// Check the structural inequalities of the (B)' / (B)'' forcing forms
/// exactly, then the sign proxy for `limsup h > 0`, `liminf h < 0` by
/// sampling `h` on the grid up to each horizon.
pub fn check_condition_b_variants(
    spec: &ForcingSpec,
    alpha: f64,
    beta: f64,
    n: usize,
    grid: &Grid,
    horizons: &[f64],
) -> Result<TrendVerdict> {
    check_weight_params(alpha, beta, n)?;
    validate_horizons(grid, horizons)?;
    let mut violations = Vec::new();
    let h_fn = match spec {
        ForcingSpec::Raw => {
            return Err(Error::Config(
                "raw forcing has no structural (B)'/(B)'' conditions to check".into(),
            ))
        }
        ForcingSpec::BPrime { sigma, h } => {
            let bound = alpha - beta + n as f64 - 1.0;
            if !(bound > 0.0) {
                violations.push(format!("alpha - beta + n - 1 > 0 fails: {bound} <= 0"));
            }
            if !(*sigma > bound) {
                violations.push(format!(
                    "sigma > alpha - beta + n - 1 fails: {sigma} <= {bound}"
                ));
            }
            h
        }
        ForcingSpec::BDoublePrime { sigma, eta, h } => {
            if !(alpha - beta < *sigma) {
                violations.push(format!(
                    "alpha - beta < sigma fails: {} >= {sigma}",
                    alpha - beta
                ));
            }
            if !(*sigma < alpha) {
                violations.push(format!("sigma < alpha fails: {sigma} >= {alpha}"));
            }
            if !(alpha <= 1.0) {
                violations.push(format!("alpha <= 1 fails: {alpha} > 1"));
            }
            if !(*eta > -1.0) {
                violations.push(format!("eta > -1 fails: {eta} <= -1"));
            }
            if !(*eta < alpha - *sigma - 1.0) {
                violations.push(format!(
                    "eta < alpha - sigma - 1 fails: {eta} >= {}",
                    alpha - *sigma - 1.0
                ));
            }
            h
        }
    };
    if !violations.is_empty() {
        return Ok(TrendVerdict {
            kind: VerdictKind::Violated,
            rows: Vec::new(),
            notes: violations,
        });
    }
    let h_sampled = SampledFn::from_fn(*grid, |t| h_fn(t))?;
    let rows = extrema_rows(&h_sampled, horizons);
    let last = rows.last().expect("at least three horizons");
    let kind = if last.running_max > 0.0 && last.running_min < 0.0 {
        VerdictKind::Supported
    } else {
        VerdictKind::Inconclusive
    };
    Ok(TrendVerdict {
        kind,
        rows,
        notes: vec!["sign proxy for limsup h > 0 and liminf h < 0".into()],
    })
}

/// Emden-Fowler-type nonlinearity description: exponents, coefficient
/// functions and forcing for the higher-order-nonlinearity condition checks.
#[derive(Clone)]
pub struct EmdenFowlerSpec {
    pub lambdas: Vec<f64>,
    pub p: TimeFn,
    pub qs: Vec<TimeFn>,
    pub g: TimeFn,
    /// Position of 1 in the exponent ordering (number of exponents below 1).
    /// Derived from `lambdas` when absent.
    pub split_index: Option<usize>,
}

impl EmdenFowlerSpec {
    /// Validate the exponent layout and return the split index
    /// (0 when all exponents exceed 1).
    fn checked_split(&self) -> Result<usize> {
        let k = self.lambdas.len();
        if k == 0 {
            return Err(Error::ConditionViolated {
                name: "(C)",
                msg: "no exponents given".into(),
            });
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0) || l == 1.0) {
            return Err(Error::ConditionViolated {
                name: "(C)",
                msg: "exponents must be positive and different from 1".into(),
            });
        }
        if self.lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ConditionViolated {
                name: "(C)",
                msg: "exponents must be strictly increasing".into(),
            });
        }
        if self.qs.len() != k {
            return Err(Error::InvalidInput(format!(
                "{} exponents but {} coefficient functions",
                k,
                self.qs.len()
            )));
        }
        let l = self.lambdas.iter().take_while(|&&x| x < 1.0).count();
        if l == k {
            return Err(Error::ConditionViolated {
                name: "(C)",
                msg: "at least one exponent must exceed 1".into(),
            });
        }
        if let Some(stated) = self.split_index {
            if stated != l {
                return Err(Error::ConditionViolated {
                    name: "(C)",
                    msg: format!("stated split index {stated} but exponents imply {l}"),
                });
            }
        }
        Ok(l)
    }
}

/// The comparison constant of the higher-order-nonlinearity condition:
///
/// - all exponents above 1: `(1 / (k lambda_1))^(lambda_k / (lambda_k - 1))`;
/// - split layout: `max{ max_(i<=l) (1 - lambda_i)
///   (l lambda_i / (sum_(j>l) lambda_j - 1))^(lambda_i / (1 - lambda_i)),
///   lambda_k - 1 }`.
///
/// Depends only on the exponent sequence, never on the coefficients.
pub fn gamma_of(spec: &EmdenFowlerSpec) -> Result<f64> {
    let l = spec.checked_split()?;
    let k = spec.lambdas.len() as f64;
    let lam = &spec.lambdas;
    let lam_k = *lam.last().unwrap();
    if l == 0 {
        let lam_1 = lam[0];
        Ok((1.0 / (k * lam_1)).powf(lam_k / (lam_k - 1.0)))
    } else {
        let tail_sum: f64 = lam[l..].iter().sum::<f64>() - 1.0;
        let mut inner: f64 = f64::NEG_INFINITY;
        for &li in &lam[..l] {
            let v = (1.0 - li) * (l as f64 * li / tail_sum).powf(li / (1.0 - li));
            inner = inner.max(v);
        }
        Ok(inner.max(lam_k - 1.0))
    }
}

/// Finite-horizon check of the combined integral condition for equations
/// with Emden-Fowler terms.
///
/// Samples the sign conditions `p != 0` and `sgn(lambda_i - 1) q_i > 0` on
/// the grid tail `t >= t_start`, builds
/// `Phi_pm = +-gamma sum_i |p|^(lambda_i/(lambda_i-1)) |q_i|^(1/(1-lambda_i)) + g`
/// on `[t_start, t_end]`, applies the weighted transform with lower limit
/// `t_start`, and requires the running min of the `+` branch to strictly
/// decrease and the running max of the `-` branch to strictly increase.
pub fn check_condition_f(
    spec: &EmdenFowlerSpec,
    alpha: f64,
    beta: f64,
    n: usize,
    t_start: f64,
    grid: &Grid,
    horizons: &[f64],
) -> Result<TrendVerdict> {
    check_weight_params(alpha, beta, n)?;
    validate_horizons(grid, horizons)?;
    if !(t_start >= 0.0 && t_start < horizons[0]) {
        return Err(Error::Config(format!(
            "t_start = {t_start} must lie before the first horizon"
        )));
    }
    let gamma_c = gamma_of(spec)?;
    let start = grid.nearest_node(t_start);

    for i in start..grid.n_nodes() {
        let t = grid.node(i);
        if (spec.p)(t) == 0.0 {
            return Err(Error::ConditionViolated {
                name: "(D)",
                msg: format!("p(t) = 0 at sampled t = {t}"),
            });
        }
        for (j, q) in spec.qs.iter().enumerate() {
            let sgn = if spec.lambdas[j] > 1.0 { 1.0 } else { -1.0 };
            if !(sgn * q(t) > 0.0) {
                return Err(Error::ConditionViolated {
                    name: "(E)",
                    msg: format!(
                        "sgn(lambda_{} - 1) q_{}(t) > 0 fails at sampled t = {t}",
                        j + 1,
                        j + 1
                    ),
                });
            }
        }
    }

    let mut core = vec![0.0f64; grid.n_nodes()];
    for (i, c) in core.iter_mut().enumerate().skip(start) {
        let t = grid.node(i);
        let p_abs = (spec.p)(t).abs();
        let mut acc = 0.0;
        for (j, q) in spec.qs.iter().enumerate() {
            let li = spec.lambdas[j];
            acc += p_abs.powf(li / (li - 1.0)) * q(t).abs().powf(1.0 / (1.0 - li));
        }
        let v = gamma_c * acc;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "condition (F) integrand",
            });
        }
        *c = v;
    }
    let g_vals: Vec<f64> = grid
        .times()
        .enumerate()
        .map(|(i, t)| if i >= start { (spec.g)(t) } else { 0.0 })
        .collect();
    let plus = SampledFn::new(
        *grid,
        core.iter().zip(&g_vals).map(|(c, g)| c + g).collect(),
    )?;
    let minus = SampledFn::new(
        *grid,
        core.iter().zip(&g_vals).map(|(c, g)| -c + g).collect(),
    )?;

    let w_plus = weighted_forcing(&plus, alpha, beta, n)?;
    let w_minus = weighted_forcing(&minus, alpha, beta, n)?;
    let rows_plus = extrema_rows(&w_plus, horizons);
    let rows_minus = extrema_rows(&w_minus, horizons);

    let min_diverges = rows_plus
        .windows(2)
        .all(|w| w[1].running_min < w[0].running_min);
    let max_diverges = rows_minus
        .windows(2)
        .all(|w| w[1].running_max > w[0].running_max);
    // Rows shown to the caller: min from the + branch, max from the - branch.
    let rows: Vec<HorizonExtrema> = rows_plus
        .iter()
        .zip(&rows_minus)
        .map(|(p, m)| HorizonExtrema {
            horizon: p.horizon,
            running_max: m.running_max,
            running_min: p.running_min,
        })
        .collect();
    Ok(TrendVerdict {
        kind: if min_diverges && max_diverges {
            VerdictKind::Supported
        } else {
            VerdictKind::Inconclusive
        },
        rows,
        notes: vec![
            format!("gamma = {gamma_c}"),
            "running min from the +gamma branch, running max from the -gamma branch".into(),
        ],
    })
}

/// Sample `x f(t, x)` on a lattice and report the smallest sampled `T`
/// beyond which no positive product was found (`None` when positive products
/// persist to the end of the range). Heuristic support for the sign
/// condition; never a proof.
pub fn check_condition_a(
    f: impl Fn(f64, f64) -> f64,
    t_range: (f64, f64),
    x_range: (f64, f64),
    samples: usize,
) -> Option<f64> {
    let samples = samples.max(2);
    let t_step = (t_range.1 - t_range.0) / (samples - 1) as f64;
    let x_step = (x_range.1 - x_range.0) / (samples - 1) as f64;
    let mut last_positive: Option<usize> = None;
    for it in 0..samples {
        let t = t_range.0 + it as f64 * t_step;
        for ix in 0..samples {
            let x = x_range.0 + ix as f64 * x_step;
            if x * f(t, x) > 0.0 {
                last_positive = Some(it);
                break;
            }
        }
    }
    match last_positive {
        None => Some(t_range.0),
        Some(it) if it + 1 >= samples => None,
        Some(it) => Some(t_range.0 + (it + 1) as f64 * t_step),
    }
}

/// Least-squares slope of `log |envelope|` against `log t`, where the
/// envelope is the sequence of 3-point local maxima of `|u|` inside the
/// window. Needs at least 5 envelope points.
pub fn estimate_decay_exponent(u: &SampledFn, window: (f64, f64)) -> Result<f64> {
    let grid = u.grid();
    if !(window.0 > 0.0 && window.0 < window.1 && window.1 <= grid.t_end() * (1.0 + 1e-12)) {
        return Err(Error::Config(format!(
            "fit window ({}, {}) must lie inside (0, {}]",
            window.0,
            window.1,
            grid.t_end()
        )));
    }
    let v = u.values();
    let mut pts = Vec::new();
    for i in 1..v.len() - 1 {
        let t = grid.node(i);
        if t < window.0 || t > window.1 {
            continue;
        }
        let a = v[i].abs();
        if a > v[i - 1].abs() && a >= v[i + 1].abs() {
            pts.push((t.ln(), a.ln()));
        }
    }
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "envelope fit needs at least 5 local maxima of |u| in the window, found {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InsufficientData(
            "degenerate envelope abscissae".into(),
        ));
    }
    Ok((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid(t_end: f64, n: usize) -> Grid {
        Grid::new(t_end, n).unwrap()
    }

    #[test]
    fn constant_has_no_crossings_and_a_sign() {
        let u = SampledFn::from_fn(grid(1.0, 100), |_| 1.0).unwrap();
        let r = count_zero_crossings(&u, 0.0);
        assert_eq!(r.count(), 0);
        assert_eq!(r.eventually_signed, Some(1));
    }

    #[test]
    fn sine_crossings_are_near_multiples_of_pi() {
        let g = grid(10.0, 10_000);
        let u = SampledFn::from_fn(g, |t| t.sin()).unwrap();
        let r = count_zero_crossings(&u, 0.0);
        assert_eq!(r.count(), 3);
        for (c, root) in r.crossings.iter().zip([
            std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
            3.0 * std::f64::consts::PI,
        ]) {
            assert!(c.t_before <= root + g.h() && root - g.h() <= c.t_after);
        }
        // sin is negative between 3 pi and 10
        assert_eq!(r.eventually_signed, Some(-1));
    }

    #[test]
    fn deadband_keeps_large_amplitude_crossings() {
        let g = grid(10.0, 10_000);
        let u = SampledFn::from_fn(g, |t| t * t.sin()).unwrap();
        let r = count_zero_crossings(&u, 0.5);
        assert_eq!(r.count(), 3);
    }

    #[test]
    fn deadband_monotonicity() {
        let g = grid(20.0, 5_000);
        let u = SampledFn::from_fn(g, |t| (t * 1.7).sin() * (-t / 8.0).exp()).unwrap();
        let mut prev = usize::MAX;
        for &db in &[0.0, 1e-6, 1e-3, 0.05, 0.2] {
            let c = count_zero_crossings(&u, db).count();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn weighted_forcing_constant_input() {
        // g = 1, alpha = 1/2, beta = 1/3, n = 1 reduces to 2 t^(1/3).
        let g = grid(4.0, 2048);
        let one = SampledFn::from_fn(g, |_| 1.0).unwrap();
        let w = weighted_forcing(&one, 0.5, 1.0 / 3.0, 1).unwrap();
        for i in (64..2048).step_by(97) {
            let t = g.node(i);
            let expect = 2.0 * t.powf(1.0 / 3.0);
            assert!(
                (w.value(i) - expect).abs() <= 2e-3 * expect,
                "t = {t}: {} vs {expect}",
                w.value(i)
            );
        }
    }

    #[test]
    fn weighted_forcing_zero_is_zero() {
        let z = SampledFn::zeros(grid(1.0, 64));
        let w = weighted_forcing(&z, 0.5, 1.0 / 3.0, 1).unwrap();
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn weighted_forcing_rejects_bad_params() {
        let z = SampledFn::zeros(grid(1.0, 64));
        assert!(weighted_forcing(&z, 0.3, 0.5, 1).is_err());
        assert!(weighted_forcing(&z, 1.5, 0.5, 1).is_err());
    }

    #[test]
    fn condition_b_inconclusive_for_constant_and_zero() {
        let g = grid(70.0, 4096);
        let one = SampledFn::from_fn(g, |_| 1.0).unwrap();
        let v = check_condition_b(&one, 0.5, 1.0 / 3.0, 1, &[20.0, 40.0, 60.0]).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        let zero = SampledFn::zeros(g);
        let v = check_condition_b(&zero, 0.5, 1.0 / 3.0, 1, &[20.0, 40.0, 60.0]).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn condition_b_needs_three_horizons() {
        let g = grid(10.0, 128);
        let one = SampledFn::from_fn(g, |_| 1.0).unwrap();
        assert!(matches!(
            check_condition_b(&one, 0.5, 1.0 / 3.0, 1, &[2.0, 4.0]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn b_variants_boundary_sigma_is_violated() {
        let spec = ForcingSpec::BDoublePrime {
            sigma: 2.0 / 3.0, // equals alpha
            eta: -0.75,
            h: Arc::new(|t: f64| ((t + 1.0).powf(0.25)).sin()),
        };
        let g = grid(150.0, 256);
        let v = check_condition_b_variants(&spec, 2.0 / 3.0, 0.5, 1, &g, &[50.0, 100.0, 150.0])
            .unwrap();
        assert_eq!(v.kind, VerdictKind::Violated);
        assert!(v.notes.iter().any(|n| n.contains("sigma < alpha")));
    }

    #[test]
    fn b_variants_constant_h_is_inconclusive() {
        let spec = ForcingSpec::BPrime {
            sigma: 2.0,
            h: Arc::new(|_| 1.0),
        };
        let g = grid(100.0, 256);
        let v =
            check_condition_b_variants(&spec, 0.5, 1.0 / 3.0, 1, &g, &[25.0, 50.0, 99.0]).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn b_variants_raw_is_config_error() {
        let g = grid(10.0, 64);
        assert!(matches!(
            check_condition_b_variants(&ForcingSpec::Raw, 0.5, 0.3, 1, &g, &[2.0, 4.0, 8.0]),
            Err(Error::Config(_))
        ));
    }

    fn ef_spec(lambdas: Vec<f64>, split: Option<usize>) -> EmdenFowlerSpec {
        let k = lambdas.len();
        EmdenFowlerSpec {
            lambdas,
            p: Arc::new(|_| 1.0),
            qs: (0..k).map(|_| Arc::new(|_: f64| 1.0) as TimeFn).collect(),
            g: Arc::new(|_| 0.0),
            split_index: split,
        }
    }

    #[test]
    fn gamma_examples() {
        // (1/2, 2) with split 1 gives exactly 1.
        let g = gamma_of(&ef_spec(vec![0.5, 2.0], Some(1))).unwrap();
        assert_eq!(g, 1.0);
        // (2, 3): (1/4)^(3/2) = 0.125.
        let g = gamma_of(&ef_spec(vec![2.0, 3.0], None)).unwrap();
        assert!((g - 0.125).abs() < 1e-15);
        // (1/2, 3/2, 2) with split 1: max{0.1, 1} = 1.
        let g = gamma_of(&ef_spec(vec![0.5, 1.5, 2.0], Some(1))).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_rejects_bad_exponent_layouts() {
        assert!(gamma_of(&ef_spec(vec![1.0, 2.0], None)).is_err());
        assert!(gamma_of(&ef_spec(vec![2.0, 0.5], None)).is_err());
        assert!(gamma_of(&ef_spec(vec![0.25, 0.5], None)).is_err());
        assert!(gamma_of(&ef_spec(vec![0.5, 2.0], Some(2))).is_err());
    }

    #[test]
    fn gamma_ignores_coefficient_functions() {
        let mut a = ef_spec(vec![0.5, 2.0], Some(1));
        a.p = Arc::new(|t: f64| -t);
        a.qs = vec![Arc::new(|t: f64| -t * t), Arc::new(|t: f64| t * t * t)];
        a.g = Arc::new(|t: f64| t.sin());
        let b = ef_spec(vec![0.5, 2.0], Some(1));
        assert_eq!(gamma_of(&a).unwrap(), gamma_of(&b).unwrap());
    }

    #[test]
    fn condition_f_rejects_zero_p_via_condition_d() {
        let mut spec = ef_spec(vec![0.5, 2.0], Some(1));
        spec.p = Arc::new(|_| 0.0);
        spec.qs = vec![Arc::new(|_: f64| -1.0), Arc::new(|_: f64| 1.0)];
        let g = grid(50.0, 512);
        let e = check_condition_f(&spec, 0.5, 1.0 / 3.0, 1, 1.0, &g, &[10.0, 25.0, 45.0]);
        assert!(matches!(
            e,
            Err(Error::ConditionViolated { name: "(D)", .. })
        ));
    }

    #[test]
    fn condition_f_rejects_wrong_sign_q_via_condition_e() {
        // lambda_1 = 1/2 < 1 needs q_1 < 0; q_1 = +1 violates the sign rule.
        let mut spec = ef_spec(vec![0.5, 2.0], Some(1));
        spec.p = Arc::new(|_| -1.0);
        spec.qs = vec![Arc::new(|_: f64| 1.0), Arc::new(|_: f64| 1.0)];
        let g = grid(50.0, 512);
        let e = check_condition_f(&spec, 0.5, 1.0 / 3.0, 1, 1.0, &g, &[10.0, 25.0, 45.0]);
        assert!(matches!(
            e,
            Err(Error::ConditionViolated { name: "(E)", .. })
        ));
    }

    #[test]
    fn condition_a_examples() {
        // f = -(t-1)x - (t^2-3)x^3: positive products disappear near sqrt(3).
        let t = check_condition_a(
            |t, x| -(t - 1.0) * x - (t * t - 3.0) * x * x * x,
            (0.0, 3.0),
            (-10.0, 10.0),
            600,
        )
        .expect("threshold exists");
        assert!((t - 3.0f64.sqrt()).abs() < 0.05, "T = {t}");

        let t = check_condition_a(|_, x| -x, (0.0, 3.0), (-2.0, 2.0), 100).unwrap();
        assert_eq!(t, 0.0);

        assert!(check_condition_a(|_, x| x, (0.0, 3.0), (-2.0, 2.0), 100).is_none());
    }

    #[test]
    fn decay_exponent_examples() {
        let g = grid(500.0, 200_000);
        let u = SampledFn::from_fn(g, |t| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(-0.5) * t.sin()
            }
        })
        .unwrap();
        let s = estimate_decay_exponent(&u, (5.0, 500.0)).unwrap();
        assert!((-0.55..=-0.45).contains(&s), "slope {s}");

        let u = SampledFn::from_fn(g, |t| t.sin()).unwrap();
        let s = estimate_decay_exponent(&u, (5.0, 500.0)).unwrap();
        assert!(s.abs() <= 0.05, "slope {s}");

        let u = SampledFn::from_fn(g, |t| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(-2.0) * (2.0 + t.sin())
            }
        })
        .unwrap();
        let s = estimate_decay_exponent(&u, (5.0, 500.0)).unwrap();
        assert!((-2.1..=-1.9).contains(&s), "slope {s}");
    }

    #[test]
    fn decay_exponent_needs_five_maxima() {
        let g = grid(10.0, 1000);
        let u = SampledFn::from_fn(g, |t| t.sin()).unwrap();
        assert!(matches!(
            estimate_decay_exponent(&u, (0.5, 10.0)),
            Err(Error::InsufficientData(_))
        ));
    }
}
