//! Numerical exercise of the two-term comparison principles for
//! `^C D^alpha x + a ^C D^beta x = f(t, x)` with `0 < beta < alpha <= 1`:
//! sub/supersolution residual certificates, pointwise ordering reports, and
//! the monotone family obtained by bumping the initial value by `1/m`.

use crate::error::{Error, Result};
use crate::fracops::{caputo_l1, InitialData};
use crate::grid::SampledFn;
use crate::solver::{solve_pece, MultiTermProblem, SolutionTrace, SolverConfig};

/// Result of a pointwise `y <= x` comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    /// `sup (y - x)` over the nodes.
    pub max_violation: f64,
    /// First node where `y - x > tol`, if any.
    pub first_violation_node: Option<usize>,
    pub passed: bool,
    pub tol: f64,
}

/// Residual `r(t) = ^C D^alpha y + a ^C D^beta y - f(t, y)` of a candidate
/// sub/supersolution, evaluated with the L1 route (backward differences for
/// `alpha = 1`). `r <= tol` everywhere certifies a numerical subsolution,
/// `r >= -tol` a supersolution.
///
/// Requires the two-term shape with `0 < beta < alpha <= 1`; the initial data
/// of `y` must agree with its first sample.
pub fn residual_inequality(
    y: &SampledFn,
    ic_y: &InitialData,
    p: &MultiTermProblem,
) -> Result<SampledFn> {
    let (alpha, beta, a) = two_term_shape(p)?;
    if (y.value(0) - ic_y.deriv(0)).abs() > 1e-9 * (1.0 + ic_y.deriv(0).abs()) {
        return Err(Error::InvalidInput(format!(
            "initial datum {} does not match first sample {}",
            ic_y.deriv(0),
            y.value(0)
        )));
    }
    let d_alpha = caputo_up_to_one(y, alpha)?;
    let d_beta = caputo_up_to_one(y, beta)?;
    let grid = *y.grid();
    let mut values = Vec::with_capacity(y.len());
    for (i, t) in grid.times().enumerate() {
        let g_i = match p.forcing() {
            None => 0.0,
            Some(crate::solver::Forcing::Callable(g)) => g(t),
            Some(crate::solver::Forcing::Sampled(s)) => s.value(i),
        };
        values.push(d_alpha.value(i) + a * d_beta.value(i) - ((p.rhs())(t, y.value(i)) + g_i));
    }
    SampledFn::new(grid, values)
}

/// Caputo derivative for orders in `(0, 1]`: L1 scheme below 1, backward
/// differences at exactly 1.
fn caputo_up_to_one(u: &SampledFn, order: f64) -> Result<SampledFn> {
    if order == 1.0 {
        let h = u.grid().h();
        let mut v = Vec::with_capacity(u.len());
        v.push(0.0);
        for w in u.values().windows(2) {
            v.push((w[1] - w[0]) / h);
        }
        return SampledFn::new(*u.grid(), v);
    }
    caputo_l1(u, order)
}

fn two_term_shape(p: &MultiTermProblem) -> Result<(f64, f64, f64)> {
    let alpha = p.highest_order();
    if alpha > 1.0 {
        return Err(Error::Domain(format!(
            "comparison principles require alpha <= 1, got {alpha}"
        )));
    }
    match p.orders().len() {
        1 => Ok((alpha, alpha / 2.0, 0.0)), // degenerate: no lower term
        2 => Ok((alpha, p.orders()[0], p.coeffs()[0])),
        k => Err(Error::Domain(format!(
            "comparison principles cover the two-term form, got {k} orders"
        ))),
    }
}

/// Pointwise comparison `y <= x` within `tol`.
pub fn verify_order(y: &SampledFn, x: &SampledFn, tol: f64) -> Result<OrderingReport> {
    y.check_same_grid(x)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut first = None;
    for (i, (yv, xv)) in y.values().iter().zip(x.values()).enumerate() {
        let d = yv - xv;
        max_violation = max_violation.max(d);
        if first.is_none() && d > tol {
            first = Some(i);
        }
    }
    Ok(OrderingReport {
        max_violation,
        first_violation_node: first,
        passed: max_violation <= tol,
        tol,
    })
}

/// Subsolution candidate built from `p` by shifting the forcing by `-eps`
/// and the initial value by `-eps`. The comparison theorem then orders its
/// solution below the base solution.
pub fn subsolution_problem(p: &MultiTermProblem, eps: f64) -> MultiTermProblem {
    p.with_shifted_initial_value(-eps).with_forcing_offset(-eps)
}

/// Solve `p` with initial value `x_0 + 1/m` for each `m`.
///
/// The traces are pointwise strictly decreasing in `m` up to solver
/// tolerance and approach the base solution as `m` grows. Any diverging
/// member aborts with an error naming its `m`.
pub fn monotone_family(
    p: &MultiTermProblem,
    cfg: &SolverConfig,
    m_values: &[u32],
) -> Result<Vec<SolutionTrace>> {
    if m_values.is_empty() || m_values.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "m_values",
            msg: "family indices must be positive".into(),
        });
    }
    let mut traces = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let shifted = p.with_shifted_initial_value(1.0 / m as f64);
        let trace = solve_pece(&shifted, cfg)?;
        if let Some(node) = trace.diverged_at {
            return Err(Error::InvalidInput(format!(
                "family member m = {m} diverged at node {node}"
            )));
        }
        traces.push(trace);
    }
    Ok(traces)
}
