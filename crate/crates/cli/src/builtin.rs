//! Built-in reproduction specs for the four bundled simulation runs.

use crate::spec::{parse, ResolvedSpec};
use anyhow::{bail, Result};

/// Spec text for one of the built-in figures (1-4).
pub fn figure_spec_text(figure: u32) -> Result<&'static str> {
    match figure {
        1 => Ok(FIG1),
        2 => Ok(FIG2),
        3 => Ok(FIG3),
        4 => Ok(FIG4),
        other => bail!("unknown figure {other} (known: 1, 2, 3, 4)"),
    }
}

pub fn figure_spec(figure: u32) -> Result<ResolvedSpec> {
    parse(figure_spec_text(figure)?)
}

/// Two-term equation with a linear-plus-cubic sign-definite right-hand side
/// and a growing oscillatory forcing; x(0) = 1 on [0, 70].
const FIG1: &str = r#"
[grid]
t_end = 70.0
n_steps = 16384

[problem]
orders = [0.3333333333333333, 0.5]
coeffs = [2.0]
ic = [1.0]

[rhs]
form = "emden_fowler"
p_poly = [-1.0, 1.0]
lambdas = [3.0]
q_polys = [[-3.0, 0.0, 1.0]]

[forcing]
form = "caputo_power_sin"
mu = 0.5
power = 1.1666666666666667
scale = 1.0

[analysis]
checks = ["oscillation", "condition_a", "condition_b"]
horizons = [20.0, 40.0, 60.0]
condition_a_x_range = [-10.0, 10.0]
condition_a_samples = 400
"#;

/// Two-term equation with Emden-Fowler terms (exponents 1/2 and 2) and a
/// strongly growing forcing; x(0) = 1 on [0, 80]. Global existence is not
/// guaranteed for this run.
const FIG2: &str = r#"
[grid]
t_end = 80.0
n_steps = 16384

[problem]
orders = [0.3333333333333333, 0.5]
coeffs = [2.0]
ic = [1.0]

[rhs]
form = "emden_fowler"
p_poly = [0.0, -1.0]
lambdas = [0.5, 2.0]
q_polys = [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0, 1.0]]

[forcing]
form = "caputo_power_sin"
mu = 0.5
power = 6.0
scale = 1.0

[analysis]
checks = ["oscillation", "condition_f"]
horizons = [30.0, 55.0, 80.0]
condition_f_start = 1.0
"#;

/// Linear relaxation with slow shifted-phase forcing; x(0) = -0.5 on
/// [0, 150].
const FIG3: &str = r#"
[grid]
t_end = 150.0
n_steps = 16384

[problem]
orders = [0.5, 0.6666666666666666]
coeffs = [2.0]
ic = [-0.5]

[rhs]
form = "linear"
coef = -1.0

[forcing]
form = "caputo_shifted_sin_root"
mu = 0.6666666666666666
sigma = 0.3333333333333333
rho = 0.25
scale = 1.0
eta = -0.75

[analysis]
checks = ["oscillation", "decay", "condition_b_variants"]
fit_window = [10.0, 150.0]
horizons = [50.0, 100.0, 150.0]
"#;

/// Same relaxation with a cubic damping term and 1/100-scaled forcing;
/// x(0) = 0.6 on [0, 150].
const FIG4: &str = r#"
[grid]
t_end = 150.0
n_steps = 16384

[problem]
orders = [0.5, 0.6666666666666666]
coeffs = [2.0]
ic = [0.6]

[rhs]
form = "emden_fowler"
p_poly = [1.0]
lambdas = [3.0]
q_polys = [[1.0]]

[forcing]
form = "caputo_shifted_sin_root"
mu = 0.6666666666666666
sigma = 0.3333333333333333
rho = 0.25
scale = 0.01
eta = -0.75

[analysis]
checks = ["oscillation", "decay", "condition_b_variants"]
fit_window = [10.0, 150.0]
horizons = [50.0, 100.0, 150.0]
"#;
