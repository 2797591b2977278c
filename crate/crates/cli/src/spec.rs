//! Declarative problem specification: a strict TOML schema mapping onto the
//! solver's problem types. Right-hand sides and forcings come from a closed
//! registry of named forms with numeric parameters; no user expressions.

use anyhow::{anyhow, bail, Context, Result};
use fractosc_core::fracops::{caputo_l1, InitialData};
use fractosc_core::solver::{Forcing, MultiTermProblem, SolverConfig};
use fractosc_core::{Grid, RhsFn, SampledFn, TimeFn};
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub grid: GridSection,
    pub problem: ProblemSection,
    pub rhs: RhsSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_end: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    /// Strictly increasing derivative orders; the last one is the highest
    /// (unit-coefficient) order.
    pub orders: Vec<f64>,
    /// One nonnegative coefficient per non-highest order.
    pub coeffs: Vec<f64>,
    /// Initial data `x(0), x'(0), ...`, `ceil(highest order)` entries.
    pub ic: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsSection {
    pub form: String,
    /// `linear`: `f(t, x) = coef * x`.
    pub coef: Option<f64>,
    /// `emden_fowler`: `f(t, x) = -p(t) x - sum_i q_i(t) sgn(x) |x|^lambda_i`
    /// with polynomial coefficient lists (constant term first).
    pub p_poly: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub q_polys: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    /// `none`, `constant`, `caputo_power_sin`, `caputo_shifted_sin_root`.
    pub form: Option<String>,
    pub scale: Option<f64>,
    /// `constant`: the value.
    pub value: Option<f64>,
    /// Caputo order of the derivative forms.
    pub mu: Option<f64>,
    /// `caputo_power_sin`: `phi(t) = t^power sin t`.
    pub power: Option<f64>,
    /// `caputo_shifted_sin_root`: `phi(t) = (t+1)^sigma sin((t+1)^rho)`.
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    /// Decay exponent of `h'` for the structural condition checks.
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub corrector_iters: Option<usize>,
    pub fp_tol: Option<f64>,
    pub blowup_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Requested checks, run in a fixed order regardless of listing order.
    #[serde(default)]
    pub checks: Vec<String>,
    pub deadband_rel: Option<f64>,
    pub fit_window: Option<[f64; 2]>,
    pub horizons: Option<Vec<f64>>,
    pub condition_f_start: Option<f64>,
    pub condition_a_x_range: Option<[f64; 2]>,
    pub condition_a_samples: Option<usize>,
}

/// A parsed and validated spec, ready to solve and analyze.
pub struct ResolvedSpec {
    pub grid: Grid,
    pub problem_shape: ProblemSection,
    pub rhs_form: RhsForm,
    pub forcing_form: ForcingForm,
    pub solver: SolverSection,
    pub analysis: AnalysisSection,
}

/// Closed registry of right-hand sides.
#[derive(Debug, Clone)]
pub enum RhsForm {
    Zero,
    Linear {
        coef: f64,
    },
    EmdenFowler {
        p_poly: Vec<f64>,
        lambdas: Vec<f64>,
        q_polys: Vec<Vec<f64>>,
    },
}

/// Closed registry of forcing terms.
#[derive(Debug, Clone)]
pub enum ForcingForm {
    None,
    Constant {
        value: f64,
    },
    CaputoPowerSin {
        mu: f64,
        power: f64,
        scale: f64,
    },
    CaputoShiftedSinRoot {
        mu: f64,
        sigma: f64,
        rho: f64,
        scale: f64,
        eta: Option<f64>,
    },
}

pub fn load(path: &Path) -> Result<ResolvedSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading spec file {}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ResolvedSpec> {
    let file: SpecFile = toml::from_str(text).context("parsing spec")?;
    resolve(file)
}

fn resolve(file: SpecFile) -> Result<ResolvedSpec> {
    let grid = Grid::new(file.grid.t_end, file.grid.n_steps).map_err(|e| anyhow!("grid: {e}"))?;

    let rhs_form = resolve_rhs(&file.rhs)?;
    let forcing_form = resolve_forcing(&file.forcing)?;

    // Problem shape is validated here so `solve` can assume it.
    build_problem(&file.problem, &rhs_form, &forcing_form, &grid)?;

    if let Some(db) = file.analysis.deadband_rel {
        if !(db >= 0.0) {
            bail!("analysis.deadband_rel must be nonnegative, got {db}");
        }
    }
    Ok(ResolvedSpec {
        grid,
        problem_shape: file.problem,
        rhs_form,
        forcing_form,
        solver: file.solver,
        analysis: file.analysis,
    })
}

fn resolve_rhs(s: &RhsSection) -> Result<RhsForm> {
    let used = |name: &str, set: bool| -> Result<()> {
        if set {
            bail!("rhs.{name} is not a parameter of rhs.form = \"{}\"", s.form);
        }
        Ok(())
    };
    match s.form.as_str() {
        "zero" => {
            used("coef", s.coef.is_some())?;
            used("p_poly", s.p_poly.is_some())?;
            used("lambdas", s.lambdas.is_some())?;
            used("q_polys", s.q_polys.is_some())?;
            Ok(RhsForm::Zero)
        }
        "linear" => {
            used("p_poly", s.p_poly.is_some())?;
            used("lambdas", s.lambdas.is_some())?;
            used("q_polys", s.q_polys.is_some())?;
            Ok(RhsForm::Linear {
                coef: s
                    .coef
                    .ok_or_else(|| anyhow!("rhs.coef required for linear"))?,
            })
        }
        "emden_fowler" => {
            used("coef", s.coef.is_some())?;
            let p_poly = s
                .p_poly
                .clone()
                .ok_or_else(|| anyhow!("rhs.p_poly required for emden_fowler"))?;
            let lambdas = s
                .lambdas
                .clone()
                .ok_or_else(|| anyhow!("rhs.lambdas required for emden_fowler"))?;
            let q_polys = s
                .q_polys
                .clone()
                .ok_or_else(|| anyhow!("rhs.q_polys required for emden_fowler"))?;
            if lambdas.is_empty() || lambdas.len() != q_polys.len() {
                bail!(
                    "rhs.lambdas ({}) and rhs.q_polys ({}) must be nonempty and equal-length",
                    lambdas.len(),
                    q_polys.len()
                );
            }
            if lambdas.iter().any(|&l| !(l > 0.0)) {
                bail!("rhs.lambdas must be positive");
            }
            Ok(RhsForm::EmdenFowler {
                p_poly,
                lambdas,
                q_polys,
            })
        }
        other => bail!("unknown rhs.form \"{other}\" (registry: zero, linear, emden_fowler)"),
    }
}

fn resolve_forcing(s: &ForcingSection) -> Result<ForcingForm> {
    let form = s.form.as_deref().unwrap_or("none");
    let used = |name: &str, set: bool| -> Result<()> {
        if set {
            bail!("forcing.{name} is not a parameter of forcing.form = \"{form}\"");
        }
        Ok(())
    };
    match form {
        "none" => {
            used("scale", s.scale.is_some())?;
            used("value", s.value.is_some())?;
            used("mu", s.mu.is_some())?;
            used("power", s.power.is_some())?;
            used("sigma", s.sigma.is_some())?;
            used("rho", s.rho.is_some())?;
            used("eta", s.eta.is_some())?;
            Ok(ForcingForm::None)
        }
        "constant" => {
            used("mu", s.mu.is_some())?;
            used("power", s.power.is_some())?;
            used("sigma", s.sigma.is_some())?;
            used("rho", s.rho.is_some())?;
            used("eta", s.eta.is_some())?;
            used("scale", s.scale.is_some())?;
            Ok(ForcingForm::Constant {
                value: s
                    .value
                    .ok_or_else(|| anyhow!("forcing.value required for constant"))?,
            })
        }
        "caputo_power_sin" => {
            used("value", s.value.is_some())?;
            used("sigma", s.sigma.is_some())?;
            used("rho", s.rho.is_some())?;
            used("eta", s.eta.is_some())?;
            let mu = s
                .mu
                .ok_or_else(|| anyhow!("forcing.mu required for caputo_power_sin"))?;
            check_mu(mu)?;
            Ok(ForcingForm::CaputoPowerSin {
                mu,
                power: s
                    .power
                    .ok_or_else(|| anyhow!("forcing.power required for caputo_power_sin"))?,
                scale: s.scale.unwrap_or(1.0),
            })
        }
        "caputo_shifted_sin_root" => {
            used("value", s.value.is_some())?;
            used("power", s.power.is_some())?;
            let mu = s
                .mu
                .ok_or_else(|| anyhow!("forcing.mu required for caputo_shifted_sin_root"))?;
            check_mu(mu)?;
            Ok(ForcingForm::CaputoShiftedSinRoot {
                mu,
                sigma: s
                    .sigma
                    .ok_or_else(|| anyhow!("forcing.sigma required for caputo_shifted_sin_root"))?,
                rho: s
                    .rho
                    .ok_or_else(|| anyhow!("forcing.rho required for caputo_shifted_sin_root"))?,
                scale: s.scale.unwrap_or(1.0),
                eta: s.eta,
            })
        }
        other => bail!(
            "unknown forcing.form \"{other}\" (registry: none, constant, caputo_power_sin, caputo_shifted_sin_root)"
        ),
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 1.0) {
        bail!("forcing.mu must lie in (0, 1), got {mu}");
    }
    Ok(())
}

/// Polynomial evaluation, constant term first.
fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Instantiate the right-hand side closure from its registry form.
pub fn build_rhs(form: &RhsForm) -> RhsFn {
    match form {
        RhsForm::Zero => Arc::new(|_, _| 0.0),
        RhsForm::Linear { coef } => {
            let c = *coef;
            Arc::new(move |_, x| c * x)
        }
        RhsForm::EmdenFowler {
            p_poly,
            lambdas,
            q_polys,
        } => {
            let p = p_poly.clone();
            let ls = lambdas.clone();
            let qs = q_polys.clone();
            Arc::new(move |t, x: f64| {
                let mut acc = -poly_eval(&p, t) * x;
                // sgn(x) |x|^lambda with sgn(0) = 0
                let sgn = if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                for (l, q) in ls.iter().zip(&qs) {
                    acc -= poly_eval(q, t) * sgn * x.abs().powf(*l);
                }
                acc
            })
        }
    }
}

/// The inner function `phi` whose Caputo derivative a forcing form takes,
/// exposed for the structural condition checks.
pub fn forcing_inner_h(form: &ForcingForm) -> Option<TimeFn> {
    match form {
        ForcingForm::CaputoShiftedSinRoot { rho, .. } => {
            let r = *rho;
            Some(Arc::new(move |t: f64| ((t + 1.0).powf(r)).sin()))
        }
        _ => None,
    }
}

/// Materialize the forcing on a grid. Caputo-derivative forms are evaluated
/// with the L1 scheme on the same grid.
pub fn build_forcing(form: &ForcingForm, grid: &Grid) -> Result<Option<Forcing>> {
    match form {
        ForcingForm::None => Ok(None),
        ForcingForm::Constant { value } => {
            let v = *value;
            Ok(Some(Forcing::Callable(Arc::new(move |_| v))))
        }
        ForcingForm::CaputoPowerSin { mu, power, scale } => {
            let p = *power;
            let phi = SampledFn::from_fn(*grid, |t| t.powf(p) * t.sin())
                .map_err(|e| anyhow!("sampling forcing: {e}"))?;
            let d = caputo_l1(&phi, *mu).map_err(|e| anyhow!("forcing derivative: {e}"))?;
            let scaled = SampledFn::new(*grid, d.values().iter().map(|v| v * scale).collect())
                .map_err(|e| anyhow!("scaling forcing: {e}"))?;
            Ok(Some(Forcing::Sampled(scaled)))
        }
        ForcingForm::CaputoShiftedSinRoot {
            mu,
            sigma,
            rho,
            scale,
            ..
        } => {
            let (s, r) = (*sigma, *rho);
            let phi = SampledFn::from_fn(*grid, |t| (t + 1.0).powf(s) * ((t + 1.0).powf(r)).sin())
                .map_err(|e| anyhow!("sampling forcing: {e}"))?;
            let d = caputo_l1(&phi, *mu).map_err(|e| anyhow!("forcing derivative: {e}"))?;
            let scaled = SampledFn::new(*grid, d.values().iter().map(|v| v * scale).collect())
                .map_err(|e| anyhow!("scaling forcing: {e}"))?;
            Ok(Some(Forcing::Sampled(scaled)))
        }
    }
}

/// Build the solver problem from spec parts on the given grid.
pub fn build_problem(
    shape: &ProblemSection,
    rhs_form: &RhsForm,
    forcing_form: &ForcingForm,
    grid: &Grid,
) -> Result<MultiTermProblem> {
    let rhs = build_rhs(rhs_form);
    let forcing = build_forcing(forcing_form, grid)?;
    let ic = InitialData::new(shape.ic.clone()).map_err(|e| anyhow!("problem.ic: {e}"))?;
    MultiTermProblem::new(shape.orders.clone(), shape.coeffs.clone(), rhs, forcing, ic)
        .map_err(|e| anyhow!("problem: {e}"))
}

/// Solver configuration from the spec's optional overrides.
pub fn build_solver_config(spec: &ResolvedSpec, grid: Grid) -> SolverConfig {
    let mut cfg = SolverConfig::new(grid);
    if let Some(it) = spec.solver.corrector_iters {
        cfg.corrector_iters = it;
    }
    if let Some(tol) = spec.solver.fp_tol {
        cfg.fp_tol = tol;
    }
    if let Some(b) = spec.solver.blowup_threshold {
        cfg.blowup_threshold = b;
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
t_end = 1.0
n_steps = 64

[problem]
orders = [0.5]
coeffs = []
ic = [3.0]

[rhs]
form = "zero"
"#;

    #[test]
    fn minimal_spec_parses() {
        let spec = parse(MINIMAL).unwrap();
        assert_eq!(spec.grid.n_steps(), 64);
        assert!(matches!(spec.rhs_form, RhsForm::Zero));
        assert!(matches!(spec.forcing_form, ForcingForm::None));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("[rhs]", "[rhs]\nbogus = 1.0");
        assert!(parse(&bad).is_err());
        let bad = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn decreasing_orders_are_rejected_with_message() {
        let bad = MINIMAL.replace(
            "orders = [0.5]\ncoeffs = []",
            "orders = [0.5, 0.3]\ncoeffs = [1.0]",
        );
        let err = match parse(&bad) {
            Err(e) => format!("{e:#}"),
            Ok(_) => panic!("expected a spec error"),
        };
        assert!(err.contains("strictly increasing"), "{err}");
    }

    #[test]
    fn per_form_parameters_are_enforced() {
        let bad = MINIMAL.replace("form = \"zero\"", "form = \"zero\"\ncoef = 1.0");
        assert!(parse(&bad).is_err());
        let bad = MINIMAL.replace("form = \"zero\"", "form = \"linear\"");
        assert!(parse(&bad).is_err());
        let bad = MINIMAL.replace("form = \"zero\"", "form = \"no_such_form\"");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn emden_fowler_rhs_matches_hand_evaluation() {
        let form = RhsForm::EmdenFowler {
            p_poly: vec![-1.0, 1.0], // p(t) = t - 1
            lambdas: vec![3.0],
            q_polys: vec![vec![-3.0, 0.0, 1.0]], // q(t) = t^2 - 3
        };
        let f = build_rhs(&form);
        for (t, x) in [(0.5, 0.7), (2.0, -1.3), (1.0, 0.0)] {
            let expect = -(t - 1.0) * x - (t * t - 3.0) * x * x * x;
            assert!((f(t, x) - expect).abs() < 1e-14);
        }
    }
}
