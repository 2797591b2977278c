//! Chain-identity verification on manufactured smooth inputs: polynomial,
//! rational, and damped oscillation, with refinement behavior.

use fractosc_core::fracops::InitialData;
use fractosc_core::reduction::{build_y_chain, verify_chain, verify_last_equation, SmoothFn};
use fractosc_core::{Grid, TimeFn};
use statrs::function::gamma::gamma;
use std::sync::Arc;

fn grid(t_end: f64, n: usize) -> Grid {
    Grid::new(t_end, n).unwrap()
}

fn rational_input() -> (SmoothFn, InitialData) {
    // x = (1+t)^-1 with derivatives (-1)^k k! (1+t)^(-k-1)
    let x = SmoothFn::new(vec![
        Arc::new(|t: f64| 1.0 / (1.0 + t)) as TimeFn,
        Arc::new(|t: f64| -1.0 / (1.0 + t).powi(2)),
        Arc::new(|t: f64| 2.0 / (1.0 + t).powi(3)),
    ])
    .unwrap();
    let ic = InitialData::new(vec![1.0, -1.0, 2.0]).unwrap();
    (x, ic)
}

fn damped_oscillation_input() -> (SmoothFn, InitialData) {
    // x = exp(-t/2) cos t
    let x0 = |t: f64| (-t / 2.0).exp() * t.cos();
    let x1 = |t: f64| (-t / 2.0).exp() * (-0.5 * t.cos() - t.sin());
    let x2 = |t: f64| (-t / 2.0).exp() * (-0.75 * t.cos() + t.sin());
    let x = SmoothFn::new(vec![Arc::new(x0) as TimeFn, Arc::new(x1), Arc::new(x2)]).unwrap();
    let ic = InitialData::new(vec![1.0, -0.5, -0.75]).unwrap();
    (x, ic)
}

fn polynomial_input() -> (SmoothFn, InitialData) {
    let x = SmoothFn::new(vec![
        Arc::new(|t: f64| t * t * t) as TimeFn,
        Arc::new(|t: f64| 3.0 * t * t),
        Arc::new(|t: f64| 6.0 * t),
    ])
    .unwrap();
    let ic = InitialData::new(vec![0.0, 0.0, 0.0]).unwrap();
    (x, ic)
}

#[test]
fn rational_chain_defect_small_and_halving() {
    // x = (1+t)^-1, n = 3, alpha = 2.5, beta = 2.2, a = 1 on [0.5, 10]:
    // defect at h = 1e-3 within 1e-2 and roughly halving with h.
    let (x, ic) = rational_input();
    let g1 = grid(10.0, 10_000);
    let chain = build_y_chain(&x, 2.5, 2.2, 1.0, &ic, &g1).unwrap();
    let d1 = verify_chain(&chain, (0.5, 10.0)).unwrap();
    assert!(d1 <= 1e-2, "defect {d1}");

    let g2 = grid(10.0, 20_000);
    let chain2 = build_y_chain(&x, 2.5, 2.2, 1.0, &ic, &g2).unwrap();
    let d2 = verify_chain(&chain2, (0.5, 10.0)).unwrap();
    let ratio = d1 / d2;
    assert!(
        (1.4..=2.6).contains(&ratio),
        "halving ratio {ratio} (defects {d1} -> {d2})"
    );
}

#[test]
fn three_smooth_inputs_converge_under_refinement() {
    for (label, (x, ic)) in [
        ("polynomial", polynomial_input()),
        ("rational", rational_input()),
        ("damped oscillation", damped_oscillation_input()),
    ] {
        let coarse = build_y_chain(&x, 2.5, 2.2, 1.0, &ic, &grid(5.0, 2000)).unwrap();
        let fine = build_y_chain(&x, 2.5, 2.2, 1.0, &ic, &grid(5.0, 8000)).unwrap();
        let dc = verify_chain(&coarse, (0.5, 5.0)).unwrap();
        let df = verify_chain(&fine, (0.5, 5.0)).unwrap();
        assert!(df < dc, "{label}: {dc} -> {df} did not shrink");
    }
}

#[test]
fn last_equation_defect_scales_linearly_in_h() {
    let (x, ic) = polynomial_input();
    let alpha = 2.5;
    let beta = 2.2;
    let g_man: TimeFn = Arc::new(move |t: f64| {
        -(gamma(4.0) / gamma(4.0 - alpha) * t.powf(3.0 - alpha)
            + gamma(4.0) / gamma(4.0 - beta) * t.powf(3.0 - beta)
            + t * t * t)
    });
    let q: TimeFn = Arc::new(|_| 1.0);
    let f: TimeFn = Arc::new(|v| v);
    let mut defects = Vec::new();
    for n in [4000usize, 8000] {
        let chain = build_y_chain(&x, alpha, beta, 1.0, &ic, &grid(5.0, n)).unwrap();
        defects.push(verify_last_equation(&chain, &q, &f, &g_man, (0.5, 5.0)).unwrap());
    }
    assert!(defects[0] <= 1e-2, "coarse defect {}", defects[0]);
    let ratio = defects[0] / defects[1];
    assert!(
        (1.4..=2.6).contains(&ratio),
        "halving ratio {ratio} (defects {defects:?})"
    );
}
