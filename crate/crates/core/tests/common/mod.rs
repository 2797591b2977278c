//! Independent oracles shared by the integration suites. Everything here is
//! computed without touching the operators under test: closed-form special
//! functions plus plain Simpson quadrature on a desingularized substitution.
#![allow(dead_code)] // each test binary uses its own subset

use statrs::function::gamma::gamma;

/// One-parameter Mittag-Leffler series `sum z^k / Gamma(alpha k + 1)`.
pub fn ml_one_param(alpha: f64, z: f64) -> f64 {
    ml_two_param(alpha, 1.0, z)
}

/// Two-parameter Mittag-Leffler series `sum z^k / Gamma(alpha k + beta)`.
pub fn ml_two_param(alpha: f64, beta: f64, z: f64) -> f64 {
    assert!(alpha > 0.0 && beta > 0.0);
    assert!(z.abs() < 30.0, "series oracle only for moderate arguments");
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 0..500 {
        let term = zk / gamma(alpha * k as f64 + beta);
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1.0) && k > 8 {
            return sum;
        }
        zk *= z;
    }
    sum
}

/// Riemann-Liouville integral `I^alpha f(t)` by Simpson quadrature on the
/// substitution `tau = (t - s)^alpha`, which removes the endpoint
/// singularity: `I^alpha f(t) = 1/(alpha Gamma(alpha)) int_0^(t^alpha)
/// f(t - tau^(1/alpha)) d tau`.
pub fn rl_integral_oracle(f: impl Fn(f64) -> f64, alpha: f64, t: f64, panels: usize) -> f64 {
    assert!(alpha > 0.0 && t > 0.0);
    let upper = t.powf(alpha);
    let n = panels.max(2) * 2; // even count for Simpson
    let h = upper / n as f64;
    let eval = |tau: f64| f(t - tau.powf(1.0 / alpha));
    let mut acc = eval(0.0) + eval(upper);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * eval(k as f64 * h);
    }
    acc * h / 3.0 / (alpha * gamma(alpha))
}

/// Caputo power rule `^C D^alpha t^p = Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha)`.
pub fn caputo_power_rule(alpha: f64, p: f64, t: f64) -> f64 {
    gamma(p + 1.0) / gamma(p + 1.0 - alpha) * t.powf(p - alpha)
}
