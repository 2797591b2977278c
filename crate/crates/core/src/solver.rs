//! Predictor-corrector solver for the multi-term Caputo initial value problem
//!
//! ```text
//! sum_i a_i ^C D^(alpha_i) x(t) + ^C D^(alpha_k) x(t) = f(t, x) + g(t),
//! x(0) = x_0, ..., x^(n-1)(0) = x_(n-1),  n = ceil(alpha_k).
//! ```
//!
//! Applying `I^(alpha_k)` turns the problem into a Volterra equation
//!
//! ```text
//! x = P(t) - sum_i a_i I^(alpha_k - alpha_i) x + I^(alpha_k) [f(., x) + g],
//! ```
//!
//! where `P` collects the Taylor polynomial of the initial data and one
//! `t^(alpha_k - alpha_i + j)` power term per lower-order derivative. The
//! scheme marches that equation with product-trapezoidal weights: an explicit
//! predictor, then fixed-point corrector sweeps on the implicit diagonal. If
//! the fixed point expands (the diagonal weight times the local Lipschitz
//! constant exceeds 1, which happens in the stiffer forced runs), the step
//! falls back to a safeguarded bracketed solve of the scalar corrector
//! equation; determinism is preserved.

use crate::error::{Error, Result};
use crate::fracops::{rl_integral, ConvWeights, InitialData};
use crate::grid::{pairwise_sum, Grid, SampledFn};
use crate::{RhsFn, TimeFn};
use statrs::function::gamma::gamma;

/// Forcing term `g(t)`: a closure or values already sampled on the grid.
#[derive(Clone)]
pub enum Forcing {
    Callable(TimeFn),
    Sampled(SampledFn),
}

impl Forcing {
    fn at_node(&self, i: usize, t: f64) -> f64 {
        match self {
            Forcing::Callable(f) => f(t),
            Forcing::Sampled(s) => s.value(i),
        }
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if let Forcing::Sampled(s) = self {
            if s.grid() != grid {
                return Err(Error::GridMismatch(
                    "sampled forcing does not live on the solver grid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The initial value problem: orders, coefficients, right-hand side and
/// initial data. The highest order has unit coefficient.
#[derive(Clone)]
pub struct MultiTermProblem {
    orders: Vec<f64>,
    coeffs: Vec<f64>,
    rhs: RhsFn,
    forcing: Option<Forcing>,
    ic: InitialData,
    lipschitz_hint: Option<f64>,
}

impl MultiTermProblem {
    pub fn new(
        orders: Vec<f64>,
        coeffs: Vec<f64>,
        rhs: RhsFn,
        forcing: Option<Forcing>,
        ic: InitialData,
    ) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidParameter {
                name: "orders",
                msg: "at least one derivative order is required".into(),
            });
        }
        if orders[0] <= 0.0 || orders.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "orders",
                msg: "orders must be finite and positive".into(),
            });
        }
        if orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter {
                name: "orders",
                msg: "orders must be strictly increasing".into(),
            });
        }
        if coeffs.len() + 1 != orders.len() {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                msg: format!(
                    "expected {} coefficients for {} orders",
                    orders.len() - 1,
                    orders.len()
                ),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                msg: "lower-order coefficients must be nonnegative".into(),
            });
        }
        let n = orders.last().unwrap().ceil() as usize;
        if ic.len() != n {
            return Err(Error::InvalidInput(format!(
                "highest order {} needs {} initial values, got {}",
                orders.last().unwrap(),
                n,
                ic.len()
            )));
        }
        Ok(MultiTermProblem {
            orders,
            coeffs,
            rhs,
            forcing,
            ic,
            lipschitz_hint: None,
        })
    }

    pub fn with_lipschitz_hint(mut self, l: f64) -> Self {
        self.lipschitz_hint = Some(l);
        self
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn highest_order(&self) -> f64 {
        *self.orders.last().unwrap()
    }

    pub fn lowest_order(&self) -> f64 {
        self.orders[0]
    }

    pub fn ic(&self) -> &InitialData {
        &self.ic
    }

    pub fn rhs(&self) -> &RhsFn {
        &self.rhs
    }

    pub fn forcing(&self) -> Option<&Forcing> {
        self.forcing.as_ref()
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    /// Same problem with the initial value shifted by `delta` (used by the
    /// comparison module's monotone families and subsolutions).
    pub fn with_shifted_initial_value(&self, delta: f64) -> Self {
        let mut p = self.clone();
        p.ic = p.ic.with_shifted_value(delta);
        p
    }

    /// Same problem with a constant added to the forcing.
    pub fn with_forcing_offset(&self, delta: f64) -> Self {
        let mut p = self.clone();
        p.forcing = Some(match &self.forcing {
            None => Forcing::Callable(std::sync::Arc::new(move |_| delta)),
            Some(Forcing::Callable(g)) => {
                let g = g.clone();
                Forcing::Callable(std::sync::Arc::new(move |t| g(t) + delta))
            }
            Some(Forcing::Sampled(s)) => {
                let values = s.values().iter().map(|v| v + delta).collect();
                Forcing::Sampled(SampledFn::new(*s.grid(), values).expect("finite shift"))
            }
        });
        p
    }
}

/// Discretization and stopping parameters for [`solve_pece`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Grid,
    pub corrector_iters: usize,
    pub fp_tol: f64,
    pub blowup_threshold: f64,
}

impl SolverConfig {
    pub fn new(grid: Grid) -> Self {
        SolverConfig {
            grid,
            corrector_iters: 2,
            fp_tol: 1e-12,
            blowup_threshold: 1e8,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.corrector_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "corrector_iters",
                msg: "must be at least 1".into(),
            });
        }
        if !(self.fp_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "fp_tol",
                msg: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// One `coef * t^exponent` term of the initial-data part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub exponent: f64,
}

/// One memory convolution `coef * I^mu x` of the Volterra form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryTerm {
    pub coef: f64,
    pub mu: f64,
}

/// Volterra reformulation `x = P(t) + sum memory + I^rhs_order [f + g]`.
#[derive(Debug, Clone)]
pub struct VolterraForm {
    poly: Vec<PowerTerm>,
    memory: Vec<MemoryTerm>,
    rhs_order: f64,
}

impl VolterraForm {
    pub fn poly_terms(&self) -> &[PowerTerm] {
        &self.poly
    }

    pub fn memory_terms(&self) -> &[MemoryTerm] {
        &self.memory
    }

    pub fn rhs_order(&self) -> f64 {
        self.rhs_order
    }

    /// Evaluate the initial-data part `P(t)`.
    pub fn eval_poly(&self, t: f64) -> f64 {
        self.poly
            .iter()
            .map(|term| {
                if term.exponent == 0.0 {
                    term.coef
                } else {
                    term.coef * t.powf(term.exponent)
                }
            })
            .sum()
    }
}

/// Restructure the problem into its Volterra integral form.
///
/// The polynomial part carries `x_j t^j / j!` for the initial data plus, for
/// each lower-order term `a_i D^(alpha_i)`, the powers
/// `a_i x_j t^(alpha_k - alpha_i + j) / Gamma(alpha_k - alpha_i + 1 + j)` for
/// `j < ceil(alpha_i)`; each lower order also contributes the memory kernel
/// `-a_i I^(alpha_k - alpha_i)`.
pub fn to_volterra(p: &MultiTermProblem) -> VolterraForm {
    let alpha_k = p.highest_order();
    let mut poly = Vec::new();
    let mut fact = 1.0;
    for (j, &xj) in p.ic.values().iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        poly.push(PowerTerm {
            coef: xj / fact,
            exponent: j as f64,
        });
    }
    let mut memory = Vec::new();
    for (&ai, &alpha_i) in p.coeffs.iter().zip(&p.orders) {
        let mu = alpha_k - alpha_i;
        if ai == 0.0 {
            continue;
        }
        memory.push(MemoryTerm { coef: -ai, mu });
        let m_i = alpha_i.ceil() as usize;
        for j in 0..m_i.min(p.ic.len()) {
            poly.push(PowerTerm {
                coef: ai * p.ic.deriv(j) / gamma(mu + 1.0 + j as f64),
                exponent: mu + j as f64,
            });
        }
    }
    VolterraForm {
        poly,
        memory,
        rhs_order: alpha_k,
    }
}

/// Result of a solve: the trace, its Volterra defect, and where the march
/// was truncated if the solution escaped the blow-up threshold.
#[derive(Debug, Clone)]
pub struct SolutionTrace {
    pub x: SampledFn,
    pub residual_norm: f64,
    pub diverged_at: Option<usize>,
}

/// March the Volterra form with a PECE scheme.
///
/// Per node: explicit predictor from the history sums with the latest sample
/// substituted on the diagonal, then corrector sweeps of the implicit
/// product-trapezoidal equation (`corrector_iters` sweeps or until successive
/// iterates differ by at most `fp_tol`). Iterate differences growing twice in
/// a row trigger the bracketed fallback solve. `|x| > blowup_threshold`
/// truncates the trace and records the node.
pub fn solve_pece(p: &MultiTermProblem, cfg: &SolverConfig) -> Result<SolutionTrace> {
    cfg.validate()?;
    if let Some(f) = &p.forcing {
        f.check_grid(&cfg.grid)?;
    }
    let grid = cfg.grid;
    let n = grid.n_steps();
    let form = to_volterra(p);
    let rhs_w = ConvWeights::new(form.rhs_order(), &grid)?;
    let mem_w: Vec<(f64, ConvWeights)> = form
        .memory_terms()
        .iter()
        .map(|m| ConvWeights::new(m.mu, &grid).map(|w| (m.coef, w)))
        .collect::<Result<_>>()?;

    let x0 = p.ic.deriv(0);
    let mut xs = vec![x0];
    let g_at = |i: usize, t: f64| p.forcing.as_ref().map_or(0.0, |g| g.at_node(i, t));
    let mut rhs_vals = vec![(p.rhs)(0.0, x0) + g_at(0, 0.0)];
    if !rhs_vals[0].is_finite() {
        return Err(Error::NonFinite {
            index: 0,
            context: "right-hand side",
        });
    }

    let diag_rhs = rhs_w.diagonal();
    // Memory coefficients are nonpositive (coef = -a_i, a_i >= 0), so the
    // folded diagonal 1 + diag_mem never vanishes.
    let diag_mem: f64 = mem_w.iter().map(|(c, w)| -c * w.diagonal()).sum();
    // Stiff-step variant: the last panel's mass moves entirely onto the
    // diagonal (right-rectangle panel), which is the L-stable counterpart of
    // the trapezoidal split. The shifts remove the left trapezoidal share of
    // that panel from the history term; the memory kernels entered the base
    // with coefficient -a_i, so their removal adds a_i * w_ii * mu * x[i-1].
    let stiff = StiffStep {
        diag_rhs: diag_rhs * (form.rhs_order() + 1.0),
        shift_rhs: diag_rhs * form.rhs_order(),
        diag_mem: mem_w
            .iter()
            .map(|(c, w)| -c * w.diagonal() * (w.mu() + 1.0))
            .sum(),
        shift_mem: mem_w.iter().map(|(c, w)| -c * w.diagonal() * w.mu()).sum(),
    };
    let mut scratch = Vec::with_capacity(n + 1);
    let mut diverged_at = None;

    for i in 1..=n {
        let t = grid.node(i);
        let mut base = form.eval_poly(t);
        for (coef, w) in &mem_w {
            base += coef * w.convolve_history(i, &xs, &mut scratch);
        }
        base += rhs_w.convolve_history(i, &rhs_vals, &mut scratch);

        let g_i = g_at(i, t);
        let predictor = base - diag_mem * xs[i - 1] + diag_rhs * rhs_vals[i - 1];
        let xi = correct(
            p,
            cfg,
            i,
            t,
            base,
            g_i,
            diag_rhs,
            diag_mem,
            predictor,
            &stiff,
            xs[i - 1],
            rhs_vals[i - 1],
        )?;

        if !xi.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "solution sample",
            });
        }
        if xi.abs() > cfg.blowup_threshold {
            diverged_at = Some(i);
            break;
        }
        xs.push(xi);
        let fi = (p.rhs)(t, xi) + g_i;
        if !fi.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "right-hand side",
            });
        }
        rhs_vals.push(fi);
    }

    let x = match diverged_at {
        Some(i) => {
            xs.truncate(i);
            SampledFn::new(grid.truncated(i - 1).unwrap_or(grid), xs)?
        }
        None => SampledFn::new(grid, xs)?,
    };
    let residual_norm = residual_check(p, &x)?;
    Ok(SolutionTrace {
        x,
        residual_norm,
        diverged_at,
    })
}

/// L-stable last-panel replacement used when the corrector's fixed point
/// expands: diagonal weights with the full last-panel mass, plus the history
/// correction that removes the left trapezoidal share of that panel.
struct StiffStep {
    diag_rhs: f64,
    shift_rhs: f64,
    diag_mem: f64,
    shift_mem: f64,
}

/// Corrector step at one node. `base` is everything independent of the new
/// sample; the implicit equation is
/// `x = (base + diag_rhs * (f(t, x) + g)) / (1 + diag_mem)`.
///
/// Fixed-point sweeps run for `corrector_iters` rounds or until the iterate
/// difference drops below `fp_tol`. Differences growing twice in a row mean
/// the map expands at this node (diagonal weight times local Lipschitz
/// constant above 1); the step is then re-posed with the L-stable panel and
/// solved by a nearest-root bracketed search around the predictor.
#[allow(clippy::too_many_arguments)]
fn correct(
    p: &MultiTermProblem,
    cfg: &SolverConfig,
    node: usize,
    t: f64,
    base: f64,
    g_i: f64,
    diag_rhs: f64,
    diag_mem: f64,
    predictor: f64,
    stiff: &StiffStep,
    x_prev: f64,
    rhs_prev: f64,
) -> Result<f64> {
    let denom = 1.0 + diag_mem;
    let sweep = |x: f64| (base + diag_rhs * ((p.rhs)(t, x) + g_i)) / denom;

    let stiff_solve = |start: f64| -> Result<f64> {
        let stiff_base = base + stiff.shift_mem * x_prev - stiff.shift_rhs * rhs_prev;
        bracketed_solve(
            p,
            cfg,
            node,
            t,
            stiff_base,
            g_i,
            stiff.diag_rhs,
            1.0 + stiff.diag_mem,
            start,
        )
    };

    let mut cur = predictor;
    let mut prev_diff = f64::INFINITY;
    let mut growths = 0usize;
    let cap = cfg.corrector_iters.max(48);
    for _ in 0..cap {
        let next = sweep(cur);
        if !next.is_finite() {
            return stiff_solve(if predictor.is_finite() {
                predictor
            } else {
                x_prev
            });
        }
        let diff = (next - cur).abs();
        cur = next;
        if diff <= cfg.fp_tol {
            return Ok(cur);
        }
        if diff > prev_diff {
            growths += 1;
            if growths >= 2 {
                return stiff_solve(x_prev);
            }
        } else {
            growths = 0;
        }
        prev_diff = diff;
    }
    // Slow contraction that never reached fp_tol: treat as stiff.
    stiff_solve(x_prev)
}

/// Root of `phi(x) = denom * x - diag_rhs * (f(t, x) + g) - base` nearest to
/// `center`: scan outward on both sides for the first sign change, then
/// bisect inside that sub-interval. Deterministic.
#[allow(clippy::too_many_arguments)]
fn bracketed_solve(
    p: &MultiTermProblem,
    cfg: &SolverConfig,
    node: usize,
    t: f64,
    base: f64,
    g_i: f64,
    diag_rhs: f64,
    denom: f64,
    center: f64,
) -> Result<f64> {
    let phi = |x: f64| denom * x - diag_rhs * ((p.rhs)(t, x) + g_i) - base;
    let c = if center.is_finite() { center } else { 0.0 };
    let fc = phi(c);
    if fc == 0.0 {
        return Ok(c);
    }
    let scale = c.abs().max(1.0);
    let mut bracket = None;
    if fc.is_finite() {
        let mut prev = [(c, fc), (c, fc)]; // [up, down]
        let mut r = 1e-4 * scale;
        for _ in 0..short_scan_limit() {
            for (side, sign) in [(0usize, 1.0), (1usize, -1.0)] {
                let x = c + sign * r;
                let fx = phi(x);
                if fx.is_finite() && fx == 0.0 {
                    return Ok(x);
                }
                if fx.is_finite() && prev[side].1.is_finite() && fx * prev[side].1 < 0.0 {
                    bracket = Some((prev[side].0, x, prev[side].1));
                    break;
                }
                prev[side] = (x, fx);
            }
            if bracket.is_some() {
                break;
            }
            r *= 1.7;
            if !r.is_finite() {
                break;
            }
        }
    } else {
        // Predictor landed outside f's finite range; fall back to a wide
        // symmetric scan around 0.
        let mut r = scale;
        let mut prev = (0.0, phi(0.0));
        for _ in 0..200 {
            for x in [prev.0 + r, -(prev.0 + r)] {
                let fx = phi(x);
                if fx.is_finite() && prev.1.is_finite() && fx * prev.1 < 0.0 {
                    bracket = Some((prev.0, x, prev.1));
                    break;
                }
            }
            if bracket.is_some() {
                break;
            }
            prev = (prev.0 + r, phi(prev.0 + r));
            r *= 2.0;
            if !r.is_finite() {
                break;
            }
        }
    }
    let (mut lo, mut hi, flo) = bracket.ok_or(Error::CorrectorDiverged { node, t })?;
    let sign_lo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = phi(mid);
        if !fm.is_finite() {
            return Err(Error::CorrectorDiverged { node, t });
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= cfg.fp_tol.max(4.0 * f64::EPSILON * mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan length covering roughly 40 orders of magnitude at ratio 1.7.
fn short_scan_limit() -> usize {
    180
}

/// Sup-norm defect of the Volterra identity at `x`, computed with the
/// fracops convolution operators (independent of the marching internals).
pub fn residual_check(p: &MultiTermProblem, x: &SampledFn) -> Result<f64> {
    let grid = *x.grid();
    if grid.n_steps() == 0 {
        return Err(Error::GridMismatch("trace has no steps".into()));
    }
    if let Some(Forcing::Sampled(s)) = &p.forcing {
        if (s.grid().h() - grid.h()).abs() > 1e-12 * grid.h() || s.grid().n_steps() < grid.n_steps()
        {
            return Err(Error::GridMismatch(
                "sampled forcing is not compatible with the trace grid".into(),
            ));
        }
    }
    let form = to_volterra(p);
    let mut rhs_vals = Vec::with_capacity(x.len());
    for (i, t) in grid.times().enumerate() {
        let g_i = match &p.forcing {
            None => 0.0,
            Some(Forcing::Callable(g)) => g(t),
            Some(Forcing::Sampled(s)) => s.value(i),
        };
        let v = (p.rhs)(t, x.value(i)) + g_i;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                context: "right-hand side",
            });
        }
        rhs_vals.push(v);
    }
    let rhs_sampled = SampledFn::new(grid, rhs_vals)?;
    let mut terms: Vec<SampledFn> = vec![rl_integral(&rhs_sampled, form.rhs_order())?];
    for m in form.memory_terms() {
        terms.push(rl_integral(x, m.mu)?);
    }
    let coefs: Vec<f64> = std::iter::once(1.0)
        .chain(form.memory_terms().iter().map(|m| m.coef))
        .collect();

    let mut defect = 0.0f64;
    let mut buf = Vec::with_capacity(terms.len() + 1);
    for (i, t) in grid.times().enumerate() {
        buf.clear();
        buf.push(form.eval_poly(t));
        for (term, c) in terms.iter().zip(&coefs) {
            buf.push(c * term.value(i));
        }
        let rhs_value = pairwise_sum(&buf);
        defect = defect.max((x.value(i) - rhs_value).abs());
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid(t_end: f64, n: usize) -> Grid {
        Grid::new(t_end, n).unwrap()
    }

    fn single_term(alpha: f64, rhs: RhsFn, x0: f64) -> MultiTermProblem {
        MultiTermProblem::new(
            vec![alpha],
            vec![],
            rhs,
            None,
            InitialData::new(vec![x0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn problem_validation_rejects_bad_shapes() {
        let rhs: RhsFn = Arc::new(|_, _| 0.0);
        let ic = InitialData::new(vec![0.0]).unwrap();
        assert!(MultiTermProblem::new(vec![], vec![], rhs.clone(), None, ic.clone()).is_err());
        assert!(
            MultiTermProblem::new(vec![0.5, 0.3], vec![1.0], rhs.clone(), None, ic.clone())
                .is_err()
        );
        assert!(
            MultiTermProblem::new(vec![0.3, 0.5], vec![-1.0], rhs.clone(), None, ic.clone())
                .is_err()
        );
        assert!(MultiTermProblem::new(vec![0.3, 0.5], vec![], rhs.clone(), None, ic).is_err());
        // ceil(1.5) = 2 initial values required
        let ic1 = InitialData::new(vec![1.0]).unwrap();
        assert!(MultiTermProblem::new(vec![1.5], vec![], rhs, None, ic1).is_err());
    }

    #[test]
    fn volterra_form_single_term_has_no_memory() {
        let p = single_term(0.5, Arc::new(|_, _| 0.0), 1.0);
        let f = to_volterra(&p);
        assert!(f.memory_terms().is_empty());
        assert_eq!(f.poly_terms().len(), 1);
        assert_eq!(f.rhs_order(), 0.5);
    }

    #[test]
    fn volterra_form_two_term_polynomial_matches_identity() {
        // alpha = 1/2, beta = 1/3, a = 2, x0 = 1: P(t) = 1 + 2 t^(1/6) / Gamma(7/6).
        let p = MultiTermProblem::new(
            vec![1.0 / 3.0, 0.5],
            vec![2.0],
            Arc::new(|_, _| 0.0),
            None,
            InitialData::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let f = to_volterra(&p);
        assert_eq!(f.memory_terms().len(), 1);
        let m = f.memory_terms()[0];
        assert!((m.coef + 2.0).abs() < 1e-15);
        assert!((m.mu - (0.5 - 1.0 / 3.0)).abs() < 1e-15);
        for t in [0.5f64, 1.0, 2.0] {
            let expect = 1.0 + 2.0 * t.powf(1.0 / 6.0) / gamma(7.0 / 6.0);
            assert!((f.eval_poly(t) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rhs_preserves_initial_value() {
        let p = single_term(0.5, Arc::new(|_, _| 0.0), 3.0);
        let cfg = SolverConfig::new(grid(1.0, 128));
        let trace = solve_pece(&p, &cfg).unwrap();
        assert!(trace.diverged_at.is_none());
        assert!(trace.x.values().iter().all(|&v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn solver_is_deterministic_bit_for_bit() {
        let p = MultiTermProblem::new(
            vec![1.0 / 3.0, 0.5],
            vec![2.0],
            Arc::new(|t: f64, x: f64| -x + (1.0 + t).sin()),
            None,
            InitialData::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let cfg = SolverConfig::new(grid(5.0, 512));
        let a = solve_pece(&p, &cfg).unwrap();
        let b = solve_pece(&p, &cfg).unwrap();
        for (x, y) in a.x.values().iter().zip(b.x.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn blow_up_truncates_with_node_index() {
        // D^0.5 x = 25 x grows like exp(625 t) and crosses the threshold early.
        let p = single_term(0.5, Arc::new(|_, x: f64| 25.0 * x), 1.0);
        let mut cfg = SolverConfig::new(grid(4.0, 4096));
        cfg.blowup_threshold = 1e6;
        let trace = solve_pece(&p, &cfg).unwrap();
        let at = trace.diverged_at.expect("must diverge");
        assert_eq!(trace.x.len(), at);
        assert!(trace.x.max_abs() <= 1e6);
        assert!(at < 4096);
    }

    #[test]
    fn rootless_corrector_equation_reports_convergence_error() {
        // D^0.5 x = x^2 with x(0) = 2: past the fold the implicit step has no
        // real root, which surfaces as a corrector failure naming the node.
        let p = single_term(0.5, Arc::new(|_, x: f64| x * x), 2.0);
        let cfg = SolverConfig::new(grid(4.0, 512));
        match solve_pece(&p, &cfg) {
            Err(Error::CorrectorDiverged { node, .. }) => assert!(node > 0),
            other => panic!("expected corrector divergence, got {other:?}"),
        }
    }

    #[test]
    fn residual_check_flags_constant_perturbation() {
        let g_man: TimeFn = Arc::new(|t: f64| {
            gamma(3.0) / gamma(2.4) * t.powf(1.4) + 2.0 * gamma(3.0) / gamma(2.6) * t.powf(1.6)
        });
        let p = MultiTermProblem::new(
            vec![0.4, 0.6],
            vec![2.0],
            Arc::new(|_, _| 0.0),
            Some(Forcing::Callable(g_man)),
            InitialData::new(vec![0.0]).unwrap(),
        )
        .unwrap();
        let g = grid(1.0, 1024);
        let exact = SampledFn::from_fn(g, |t| t * t).unwrap();
        let base = residual_check(&p, &exact).unwrap();
        assert!(base < 1e-3, "defect of the true solution: {base}");
        let perturbed =
            SampledFn::new(g, exact.values().iter().map(|v| v + 1.0).collect()).unwrap();
        let d = residual_check(&p, &perturbed).unwrap();
        // The identity maps the +1 shift to 1 + 2 I^0.2 1 >= 1 at every node.
        assert!(d >= 0.5, "perturbed defect: {d}");
    }
}
