//! Change of variables for the higher-order two-term equation
//! `^C D^alpha x + a ^C D^beta x + q(t) f(x) + sgn(x) g(t) = 0` with
//! `n - 1 < beta < alpha <= n`, `n >= 3`:
//!
//! ```text
//! y_1 = I^(n-alpha) x + a I^(n-beta) x,
//! y_i = ^C D^(alpha-n-1+i) x + a ^C D^(beta-n-1+i) x + correction sums,
//! ```
//!
//! so that `y_i' = y_(i+1)` and the last derivative carries the equation's
//! right-hand side. The module builds the chain from a callable with
//! analytic derivatives, measures the chain-identity defect, classifies tail
//! sign patterns, and checks the `O(t^(alpha-n))` tail-decay claim.

use crate::error::{Error, Result};
use crate::fracops::{caputo_l1, caputo_marchaud_from_deriv, rl_integral, InitialData};
use crate::grid::{Grid, SampledFn};
use crate::TimeFn;
use statrs::function::gamma::gamma;

/// A scalar function given together with its derivatives: `derivs[k]`
/// evaluates the k-th derivative.
#[derive(Clone)]
pub struct SmoothFn {
    derivs: Vec<TimeFn>,
}

impl SmoothFn {
    pub fn new(derivs: Vec<TimeFn>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(Error::InvalidInput(
                "a smooth input needs at least the function itself".into(),
            ));
        }
        Ok(SmoothFn { derivs })
    }

    /// Highest derivative index available.
    pub fn max_derivative(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn eval(&self, k: usize, t: f64) -> f64 {
        (self.derivs[k])(t)
    }

    fn sample(&self, k: usize, grid: &Grid) -> Result<SampledFn> {
        SampledFn::from_fn(*grid, |t| self.eval(k, t))
    }
}

/// The first-order chain `y_1 ... y_n` built from one input function.
///
/// `ys[i-1]` holds `y_i`. Values of `y_2 ... y_n` at the node `t = 0` are set
/// to zero by convention; the chain members may be singular there and every
/// diagnostic works on windows bounded away from zero.
#[derive(Debug, Clone)]
pub struct YChain {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub ic: InitialData,
    pub xs: SampledFn,
    pub ys: Vec<SampledFn>,
}

impl YChain {
    pub fn grid(&self) -> &Grid {
        self.xs.grid()
    }
}

fn validate_orders(n: usize, alpha: f64, beta: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "n",
            msg: format!("the reduction needs n >= 3, got {n}"),
        });
    }
    let nf = n as f64;
    if !(nf - 1.0 < beta && beta < alpha && alpha <= nf) {
        return Err(Error::InvalidParameter {
            name: "alpha/beta",
            msg: format!(
                "need n-1 < beta < alpha <= n, got beta = {beta}, alpha = {alpha}, n = {n}"
            ),
        });
    }
    Ok(())
}

/// Caputo derivative of `x` of arbitrary positive order, routed by order:
/// integer orders use the analytic derivative, orders in `(0, 1)` the L1
/// scheme on samples, higher fractional orders the Marchaud-type form fed by
/// the analytic `(ceil - 1)`-st derivative.
fn caputo_any(x: &SmoothFn, grid: &Grid, order: f64) -> Result<SampledFn> {
    let rounded = order.round();
    if (order - rounded).abs() < 1e-12 {
        let k = rounded as usize;
        if k > x.max_derivative() {
            return Err(Error::InvalidInput(format!(
                "derivative of order {k} not supplied"
            )));
        }
        // Integer-order Caputo derivative is the classical derivative; at the
        // origin the convention of the fractional routes (value 0) does not
        // apply, but chain diagnostics never look at t = 0.
        return x.sample(k, grid);
    }
    if order < 1.0 {
        return caputo_l1(&x.sample(0, grid)?, order);
    }
    let q = order.ceil() as usize;
    if q - 1 > x.max_derivative() {
        return Err(Error::InvalidInput(format!(
            "order {order} needs derivative {} of the input",
            q - 1
        )));
    }
    let v = x.sample(q - 1, grid)?;
    caputo_marchaud_from_deriv(&v, x.eval(q - 1, 0.0), order)
}

/// Product `prod_(j=0)^(count-1) (c + j)` evaluated directly; the factors can
/// be negative, so a log-gamma ratio is not usable here.
fn rising_product(c: f64, count: usize) -> f64 {
    (0..count).fold(1.0, |acc, j| acc * (c + j as f64))
}

/// Initial-data correction sum of `y_i` for one of the two kernel exponents:
/// `sum_(k=0)^(i-2) x_k prod_(j=0)^(i-2-k)(n - mu - i + 2 + k + j)
///   / Gamma(n - mu + 1) * t^(n - mu - i + 1 + k)`.
fn correction_sum(i: usize, n: usize, mu: f64, ic: &InitialData, t: f64) -> f64 {
    debug_assert!(i >= 2);
    let nf = n as f64;
    let denom = gamma(nf - mu + 1.0);
    let mut acc = 0.0;
    for k in 0..=(i - 2) {
        let c = nf - mu - i as f64 + 2.0 + k as f64;
        let prod = rising_product(c, i - 1 - k);
        let expo = nf - mu - i as f64 + 1.0 + k as f64;
        acc += ic.deriv(k) * prod / denom * t.powf(expo);
    }
    acc
}

/// Correction terms in the derivative of `y_n`:
/// `sum_(k=0)^(n-1) x_k prod_(j=0)^(n-1-k)(1 - mu + k + j) / Gamma(n - mu + 1)
///   * t^(-mu + k)`.
fn last_equation_correction(n: usize, mu: f64, ic: &InitialData, t: f64) -> f64 {
    let nf = n as f64;
    let denom = gamma(nf - mu + 1.0);
    let mut acc = 0.0;
    for k in 0..n {
        let c = 1.0 - mu + k as f64;
        let prod = rising_product(c, n - k);
        acc += ic.deriv(k) * prod / denom * t.powf(-mu + k as f64);
    }
    acc
}

/// Build the chain `y_1 ... y_n` on `grid` from an input with analytic
/// derivatives up to order `n - 2` and its initial data.
pub fn build_y_chain(
    x: &SmoothFn,
    alpha: f64,
    beta: f64,
    a: f64,
    ic: &InitialData,
    grid: &Grid,
) -> Result<YChain> {
    let n = alpha.ceil() as usize;
    validate_orders(n, alpha, beta)?;
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            msg: format!("coefficient must be nonnegative, got {a}"),
        });
    }
    if ic.len() != n {
        return Err(Error::InvalidInput(format!(
            "chain with n = {n} needs {n} initial values, got {}",
            ic.len()
        )));
    }
    if x.max_derivative() + 2 < n {
        return Err(Error::InvalidInput(format!(
            "chain with n = {n} needs derivatives up to order {}",
            n - 2
        )));
    }
    let xs = x.sample(0, grid)?;
    let nf = n as f64;

    // y_1 = I^(n-alpha) x + a I^(n-beta) x; I^0 degenerates to the identity.
    let part_alpha = if (nf - alpha).abs() < 1e-12 {
        xs.clone()
    } else {
        rl_integral(&xs, nf - alpha)?
    };
    let part_beta = rl_integral(&xs, nf - beta)?;
    let y1 = SampledFn::new(
        *grid,
        part_alpha
            .values()
            .iter()
            .zip(part_beta.values())
            .map(|(u, v)| u + a * v)
            .collect(),
    )?;

    let mut ys = vec![y1];
    for i in 2..=n {
        let da = caputo_any(x, grid, alpha - nf - 1.0 + i as f64)?;
        let db = caputo_any(x, grid, beta - nf - 1.0 + i as f64)?;
        let mut values = Vec::with_capacity(grid.n_nodes());
        values.push(0.0); // singular corrections at the origin; not evaluated
        for node in 1..grid.n_nodes() {
            let t = grid.node(node);
            let corr = correction_sum(i, n, alpha, ic, t) + a * correction_sum(i, n, beta, ic, t);
            values.push(da.value(node) + a * db.value(node) + corr);
        }
        ys.push(SampledFn::new(*grid, values)?);
    }
    Ok(YChain {
        n,
        alpha,
        beta,
        a,
        ic: ic.clone(),
        xs,
        ys,
    })
}

fn window_nodes(grid: &Grid, window: (f64, f64)) -> Result<(usize, usize)> {
    if !(window.0 > 0.0 && window.0 < window.1 && window.1 <= grid.t_end() * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!(
            "window ({}, {}) must lie inside (0, {}]",
            window.0,
            window.1,
            grid.t_end()
        )));
    }
    let lo = grid.nearest_node(window.0).max(1);
    let hi = grid.nearest_node(window.1);
    Ok((lo, hi))
}

/// Sup over the window of the forward-difference defect
/// `|(y_i(t+h) - y_i(t))/h - y_(i+1)(t)|`, maximized over `i = 1 .. n-1`.
/// Converges to zero under refinement for smooth inputs.
pub fn verify_chain(chain: &YChain, window: (f64, f64)) -> Result<f64> {
    let grid = chain.grid();
    let (lo, hi) = window_nodes(grid, window)?;
    let h = grid.h();
    let mut defect = 0.0f64;
    for i in 0..chain.n - 1 {
        let yi = &chain.ys[i];
        let yn = &chain.ys[i + 1];
        for j in lo..hi.min(grid.n_steps()) {
            let fd = (yi.value(j + 1) - yi.value(j)) / h;
            defect = defect.max((fd - yn.value(j)).abs());
        }
    }
    Ok(defect)
}

/// Sup over the window of the defect in the chain's last equation:
/// forward difference of `y_n` against
/// `-q(t) f(x(t)) - sgn(x(t)) g(t) + correction terms`.
pub fn verify_last_equation(
    chain: &YChain,
    q: &TimeFn,
    f: &TimeFn,
    g: &TimeFn,
    window: (f64, f64),
) -> Result<f64> {
    let grid = chain.grid();
    let (lo, hi) = window_nodes(grid, window)?;
    let h = grid.h();
    let yn = chain.ys.last().expect("chain has at least three members");
    let mut defect = 0.0f64;
    for j in lo..hi.min(grid.n_steps()) {
        let t = grid.node(j);
        let xv = chain.xs.value(j);
        let rhs = -q(t) * f(xv) - xv.signum() * g(t)
            + last_equation_correction(chain.n, chain.alpha, &chain.ic, t)
            + chain.a * last_equation_correction(chain.n, chain.beta, &chain.ic, t);
        let fd = (yn.value(j + 1) - yn.value(j)) / h;
        defect = defect.max((fd - rhs).abs());
    }
    Ok(defect)
}

/// The three admissible tail sign layouts of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    /// `(-1)^(i+1) y_i > 0`: signs `+ - + - ...`
    AltFromPositive,
    /// `(-1)^i y_i > 0`: signs `- + - + ...`
    AltFromNegative,
    /// `y_1 > 0`, `y_2 > 0`, then `(-1)^i y_i > 0` for `i >= 3`.
    DoublePositiveHead,
}

/// Outcome of the tail sign classification.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternVerdict {
    /// Matched pattern; `None` when every member is strictly signed but no
    /// pattern fits.
    pub pattern: Option<SignPattern>,
    /// Some chain member changes sign inside the tail.
    pub mixed: bool,
    /// Whether the matched pattern is admissible for the parity of `n`
    /// (odd `n` admits only the alternating-from-positive layout, even `n`
    /// the other two).
    pub parity_admissible: bool,
    /// Strict tail sign per member: +1, -1, or 0 for mixed.
    pub tail_signs: Vec<i8>,
}

/// Inspect the signs of every `y_i` on the trailing `tail_fraction` of the
/// grid and match them against the three admissible layouts.
pub fn classify_sign_pattern(chain: &YChain, tail_fraction: f64) -> Result<PatternVerdict> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            msg: format!("must lie in (0, 1), got {tail_fraction}"),
        });
    }
    let grid = chain.grid();
    let n_nodes = grid.n_nodes();
    let start = ((1.0 - tail_fraction) * n_nodes as f64).floor() as usize;
    if n_nodes - start < 100 {
        return Err(Error::InsufficientData(format!(
            "tail window holds {} nodes, need at least 100",
            n_nodes - start
        )));
    }
    let tail_signs: Vec<i8> = chain
        .ys
        .iter()
        .map(|y| {
            let vs = &y.values()[start..];
            if vs.iter().all(|&v| v > 0.0) {
                1
            } else if vs.iter().all(|&v| v < 0.0) {
                -1
            } else {
                0
            }
        })
        .collect();
    let mixed = tail_signs.contains(&0);
    let pattern = if mixed {
        None
    } else {
        let matches = |expected: &dyn Fn(usize) -> i8| {
            tail_signs
                .iter()
                .enumerate()
                .all(|(idx, &s)| s == expected(idx + 1))
        };
        if matches(&|i| if i % 2 == 1 { 1 } else { -1 }) {
            Some(SignPattern::AltFromPositive)
        } else if matches(&|i| if i % 2 == 0 { 1 } else { -1 }) {
            Some(SignPattern::AltFromNegative)
        } else if matches(&|i| if i <= 2 || i % 2 == 0 { 1 } else { -1 }) {
            Some(SignPattern::DoublePositiveHead)
        } else {
            None
        }
    };
    let parity_admissible = match pattern {
        Some(SignPattern::AltFromPositive) => !chain.n.is_multiple_of(2),
        Some(SignPattern::AltFromNegative) | Some(SignPattern::DoublePositiveHead) => {
            chain.n.is_multiple_of(2)
        }
        None => false,
    };
    Ok(PatternVerdict {
        pattern,
        mixed,
        parity_admissible,
        tail_signs,
    })
}

/// Weighted tail magnitude `sup t^(n-alpha) |x(t)|` over a window, with the
/// last quarter compared against the first quarter to flag growth that
/// contradicts the `O(t^(alpha-n))` claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDecayReport {
    pub sup: f64,
    pub first_quarter_sup: f64,
    pub last_quarter_sup: f64,
    /// Last-quarter sup exceeds 1.5 times the first-quarter sup.
    pub flagged: bool,
}

pub fn tail_decay_check(
    x: &SampledFn,
    alpha: f64,
    n: usize,
    window: (f64, f64),
) -> Result<TailDecayReport> {
    let grid = x.grid();
    let (lo, hi) = window_nodes(grid, window)?;
    let span = window.1 - window.0;
    let q1_end = window.0 + 0.25 * span;
    let q4_start = window.1 - 0.25 * span;
    let weight = n as f64 - alpha;
    let mut sup = 0.0f64;
    let mut first = 0.0f64;
    let mut last = 0.0f64;
    for j in lo..=hi {
        let t = grid.node(j);
        let w = t.powf(weight) * x.value(j).abs();
        sup = sup.max(w);
        if t <= q1_end {
            first = first.max(w);
        }
        if t >= q4_start {
            last = last.max(w);
        }
    }
    Ok(TailDecayReport {
        sup,
        first_quarter_sup: first,
        last_quarter_sup: last,
        flagged: last > 1.5 * first,
    })
}
