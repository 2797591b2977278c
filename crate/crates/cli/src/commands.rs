//! The three commands behind the CLI: solve a spec to CSV, analyze a trace
//! against a spec's requested checks, and reproduce the built-in runs.

use crate::builtin::figure_spec;
use crate::csvio::{read_solution, render_solution, write_atomic};
use crate::spec::{
    build_problem, build_rhs, build_solver_config, forcing_inner_h, load, ForcingForm,
    ResolvedSpec, RhsForm,
};
use crate::svg;
use crate::{EXIT_NUMERICAL, EXIT_OK, EXIT_SPEC_ERROR};
use anyhow::{anyhow, Result};
use fractosc_core::oscillation::{
    check_condition_a, check_condition_b, check_condition_b_variants, check_condition_f,
    count_zero_crossings, estimate_decay_exponent, EmdenFowlerSpec, ForcingSpec,
};
use fractosc_core::solver::{solve_pece, Forcing, SolutionTrace};
use fractosc_core::{Error as CoreError, Grid, SampledFn, TimeFn};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Options shared by all commands.
pub struct GlobalOpts {
    pub out_dir: PathBuf,
    pub grid_steps: Option<usize>,
}

fn effective_grid(spec: &ResolvedSpec, opts: &GlobalOpts) -> Result<Grid> {
    match opts.grid_steps {
        Some(n) => Grid::new(spec.grid.t_end(), n).map_err(|e| anyhow!("grid override: {e}")),
        None => Ok(spec.grid),
    }
}

fn solve_spec(
    spec: &ResolvedSpec,
    grid: Grid,
) -> Result<std::result::Result<SolutionTrace, CoreError>> {
    let problem = build_problem(
        &spec.problem_shape,
        &spec.rhs_form,
        &spec.forcing_form,
        &grid,
    )?;
    let cfg = build_solver_config(spec, grid);
    match solve_pece(&problem, &cfg) {
        Ok(trace) => Ok(Ok(trace)),
        Err(e @ CoreError::CorrectorDiverged { .. }) => Ok(Err(e)),
        Err(e) => Err(anyhow!("solver: {e}")),
    }
}

/// `solve <spec>`: write `<spec stem>.csv` into the output directory.
/// Exit 0 on success, 2 on numerical failure (truncated CSV plus trailer
/// comment), 1 on spec errors.
pub fn cmd_solve(spec_path: &Path, opts: &GlobalOpts) -> Result<i32> {
    let spec = match load(spec_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("spec error: {e:#}");
            return Ok(EXIT_SPEC_ERROR);
        }
    };
    let grid = effective_grid(&spec, opts)?;
    let stem = spec_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "solution".into());
    let out_path = opts.out_dir.join(format!("{stem}.csv"));
    match solve_spec(&spec, grid)? {
        Ok(trace) => {
            write_atomic(&out_path, &render_solution(&trace))?;
            println!(
                "wrote {} ({} rows, residual {:.3e})",
                out_path.display(),
                trace.x.len(),
                trace.residual_norm
            );
            if let Some(node) = trace.diverged_at {
                println!("run diverged at node {node}; output truncated");
                return Ok(EXIT_NUMERICAL);
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            write_atomic(&out_path, &format!("t,x\n# failed: {e}\n"))?;
            eprintln!("numerical failure: {e}");
            Ok(EXIT_NUMERICAL)
        }
    }
}

/// `analyze <spec> <csv>`: run the spec's requested checks against a trace.
pub fn cmd_analyze(spec_path: &Path, csv_path: &Path, opts: &GlobalOpts) -> Result<i32> {
    let spec = match load(spec_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("spec error: {e:#}");
            return Ok(EXIT_SPEC_ERROR);
        }
    };
    let parsed = match read_solution(csv_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("csv error: {e:#}");
            return Ok(EXIT_SPEC_ERROR);
        }
    };
    let report = render_analysis(&spec, &parsed.x, Some(opts))?;
    print!("{report}");
    if spec.analysis.checks.iter().any(|c| c == "oscillation") {
        let stem = csv_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trace".into());
        let out = opts.out_dir.join(format!("{stem}_crossings.csv"));
        write_atomic(&out, &crossings_csv(&spec, &parsed.x))?;
        println!("wrote {}", out.display());
    }
    Ok(EXIT_OK)
}

/// `reproduce <1|2|3|4>`: run a built-in spec and write `figN.csv` and
/// `figN.svg`. Blow-up (possible in the superlinear run, where global
/// existence is not guaranteed) exits 2 with truncated outputs.
pub fn cmd_reproduce(figure: u32, opts: &GlobalOpts) -> Result<i32> {
    let spec = match figure_spec(figure) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e:#}");
            return Ok(EXIT_SPEC_ERROR);
        }
    };
    let grid = effective_grid(&spec, opts)?;
    let csv_path = opts.out_dir.join(format!("fig{figure}.csv"));
    let svg_path = opts.out_dir.join(format!("fig{figure}.svg"));
    let title = format!("figure {figure} reproduction");
    match solve_spec(&spec, grid)? {
        Ok(trace) => {
            write_atomic(&csv_path, &render_solution(&trace))?;
            write_atomic(&svg_path, &svg::render(&trace.x, &title))?;
            println!("wrote {} and {}", csv_path.display(), svg_path.display());
            let report = render_analysis(&spec, &trace.x, None)?;
            print!("{report}");
            if let Some(node) = trace.diverged_at {
                println!(
                    "run diverged at node {node} (t = {:.4}); outputs truncated.",
                    trace.x.grid().t_end()
                );
                println!(
                    "note: existence theory for this equation is conditional; solutions need not exist globally."
                );
                return Ok(EXIT_NUMERICAL);
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            write_atomic(&csv_path, &format!("t,x\n# failed: {e}\n"))?;
            eprintln!("numerical failure: {e}");
            eprintln!(
                "note: existence theory for this equation is conditional; solutions need not exist globally."
            );
            Ok(EXIT_NUMERICAL)
        }
    }
}

/// Wrap a sampled forcing into a callable for the condition checks.
fn sampled_to_fn(s: SampledFn) -> TimeFn {
    Arc::new(move |t: f64| s.value(s.grid().nearest_node(t)))
}

fn poly_fn(coeffs: &[f64]) -> TimeFn {
    let c: Vec<f64> = coeffs.to_vec();
    Arc::new(move |t: f64| c.iter().rev().fold(0.0, |acc, &k| acc * t + k))
}

/// Render the requested analysis blocks in a fixed order. Deterministic:
/// block order and content depend only on the spec and the trace.
pub fn render_analysis(
    spec: &ResolvedSpec,
    trace: &SampledFn,
    _opts: Option<&GlobalOpts>,
) -> Result<String> {
    let mut out = String::new();
    let checks = &spec.analysis.checks;
    let has = |name: &str| checks.iter().any(|c| c == name);
    let (alpha, beta, n) = problem_exponents(spec);
    let grid = *trace.grid();

    if has("oscillation") {
        let deadband = spec.analysis.deadband_rel.unwrap_or(1e-9) * trace.max_abs();
        let report = count_zero_crossings(trace, deadband);
        writeln!(out, "== oscillation ==")?;
        writeln!(out, "deadband: {deadband:.3e}")?;
        writeln!(out, "crossings: {}", report.count())?;
        if let Some(first) = report.crossings.first() {
            writeln!(out, "first: [{:.6}, {:.6}]", first.t_before, first.t_after)?;
        }
        if let Some(last) = report.crossings.last() {
            writeln!(out, "last: [{:.6}, {:.6}]", last.t_before, last.t_after)?;
        }
        match report.eventually_signed {
            Some(s) => writeln!(out, "eventually_signed: {}", if s > 0 { "+" } else { "-" })?,
            None => writeln!(out, "eventually_signed: none")?,
        }
        writeln!(out)?;
    }

    if has("decay") {
        writeln!(out, "== decay ==")?;
        let window = spec
            .analysis
            .fit_window
            .map(|w| (w[0], w[1]))
            .unwrap_or((grid.t_end() / 10.0, grid.t_end()));
        match estimate_decay_exponent(trace, window) {
            Ok(slope) => {
                writeln!(out, "fit window: [{}, {}]", window.0, window.1)?;
                writeln!(out, "envelope_exponent: {slope:.6}")?;
                writeln!(
                    out,
                    "{}",
                    if slope <= 0.0 {
                        "PASS (non-growing envelope)"
                    } else {
                        "FAIL (growing envelope)"
                    }
                )?;
            }
            Err(e) => writeln!(out, "UNAVAILABLE: {e}")?,
        }
        writeln!(out)?;
    }

    if has("condition_a") {
        writeln!(out, "== condition_a (heuristic sampling) ==")?;
        let rhs = build_rhs(&spec.rhs_form);
        let x_range = spec
            .analysis
            .condition_a_x_range
            .map(|r| (r[0], r[1]))
            .unwrap_or((-10.0, 10.0));
        let samples = spec.analysis.condition_a_samples.unwrap_or(400);
        match check_condition_a(|t, x| rhs(t, x), (0.0, grid.t_end()), x_range, samples) {
            Some(t) => writeln!(out, "sign condition holds beyond sampled T = {t:.6}")?,
            None => writeln!(out, "NOT-FOUND: positive products persist to the horizon")?,
        }
        writeln!(out)?;
    }

    if has("condition_b") {
        writeln!(out, "== condition_b ==")?;
        match require_horizons(spec).and_then(|hs| {
            let g = forcing_samples(spec, &grid)?;
            check_condition_b(&g, alpha, beta, n, &hs).map_err(|e| anyhow!("{e}"))
        }) {
            Ok(verdict) => writeln!(out, "{verdict}")?,
            Err(e) => writeln!(out, "UNAVAILABLE: {e}")?,
        }
        writeln!(out)?;
    }

    if has("condition_b_variants") {
        writeln!(out, "== condition_b_variants ==")?;
        match b_variant_spec(spec).and_then(|fs| {
            let hs = require_horizons(spec)?;
            check_condition_b_variants(&fs, alpha, beta, n, &grid, &hs).map_err(|e| anyhow!("{e}"))
        }) {
            Ok(verdict) => writeln!(out, "{verdict}")?,
            Err(e) => writeln!(out, "UNAVAILABLE: {e}")?,
        }
        writeln!(out)?;
    }

    if has("condition_f") {
        writeln!(out, "== condition_f ==")?;
        match f_condition_verdict(spec, &grid, alpha, beta, n) {
            Ok(verdict) => writeln!(out, "{verdict}")?,
            Err(e) => writeln!(out, "UNAVAILABLE: {e}")?,
        }
        writeln!(out)?;
    }

    Ok(out)
}

fn problem_exponents(spec: &ResolvedSpec) -> (f64, f64, usize) {
    let orders = &spec.problem_shape.orders;
    let alpha = *orders.last().unwrap();
    let beta = if orders.len() >= 2 {
        orders[orders.len() - 2]
    } else {
        alpha / 2.0
    };
    (alpha, beta, alpha.ceil() as usize)
}

fn require_horizons(spec: &ResolvedSpec) -> Result<Vec<f64>> {
    spec.analysis
        .horizons
        .clone()
        .ok_or_else(|| anyhow!("analysis.horizons required for trend checks"))
}

fn forcing_samples(spec: &ResolvedSpec, grid: &Grid) -> Result<SampledFn> {
    match crate::spec::build_forcing(&spec.forcing_form, grid)? {
        Some(Forcing::Sampled(s)) => Ok(s),
        Some(Forcing::Callable(f)) => {
            SampledFn::from_fn(*grid, |t| f(t)).map_err(|e| anyhow!("{e}"))
        }
        None => Ok(SampledFn::zeros(*grid)),
    }
}

fn b_variant_spec(spec: &ResolvedSpec) -> Result<ForcingSpec> {
    match &spec.forcing_form {
        ForcingForm::CaputoShiftedSinRoot { sigma, eta, .. } => {
            let h = forcing_inner_h(&spec.forcing_form).expect("shifted form has inner h");
            Ok(match eta {
                Some(eta) => ForcingSpec::BDoublePrime {
                    sigma: *sigma,
                    eta: *eta,
                    h,
                },
                None => ForcingSpec::BPrime { sigma: *sigma, h },
            })
        }
        _ => Err(anyhow!(
            "condition_b_variants needs a caputo_shifted_sin_root forcing"
        )),
    }
}

fn f_condition_verdict(
    spec: &ResolvedSpec,
    grid: &Grid,
    alpha: f64,
    beta: f64,
    n: usize,
) -> Result<fractosc_core::oscillation::TrendVerdict> {
    let RhsForm::EmdenFowler {
        p_poly,
        lambdas,
        q_polys,
    } = &spec.rhs_form
    else {
        return Err(anyhow!("condition_f needs an emden_fowler right-hand side"));
    };
    let horizons = require_horizons(spec)?;
    let t_start = spec
        .analysis
        .condition_f_start
        .ok_or_else(|| anyhow!("analysis.condition_f_start required for condition_f"))?;
    let g = sampled_to_fn(forcing_samples(spec, grid)?);
    let ef = EmdenFowlerSpec {
        lambdas: lambdas.clone(),
        p: poly_fn(p_poly),
        qs: q_polys.iter().map(|q| poly_fn(q)).collect(),
        g,
        split_index: None,
    };
    check_condition_f(&ef, alpha, beta, n, t_start, grid, &horizons).map_err(|e| anyhow!("{e}"))
}

/// Solve a built-in figure spec, optionally overriding the step count.
/// Numerical failures come back as the core error.
pub fn solve_figure(
    figure: u32,
    grid_steps: Option<usize>,
) -> Result<std::result::Result<SolutionTrace, CoreError>> {
    let spec = figure_spec(figure)?;
    let grid = match grid_steps {
        Some(n) => Grid::new(spec.grid.t_end(), n).map_err(|e| anyhow!("grid override: {e}"))?,
        None => spec.grid,
    };
    solve_spec(&spec, grid)
}

/// Crossings CSV for a trace, exposed for the analyze command's side output.
pub fn crossings_csv(spec: &ResolvedSpec, trace: &SampledFn) -> String {
    let deadband = spec.analysis.deadband_rel.unwrap_or(1e-9) * trace.max_abs();
    count_zero_crossings(trace, deadband).crossings_csv()
}

/// Read a trace back (used by tests and the analyze flow).
pub fn load_trace(csv_path: &Path) -> Result<SampledFn> {
    Ok(read_solution(csv_path)?.x)
}
