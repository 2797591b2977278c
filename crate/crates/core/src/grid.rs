use crate::error::{Error, Result};

/// Uniform time mesh on `[0, t_end]` with nodes `t_i = i * h`.
///
/// All operators in this crate anchor at `t = 0`, so the first node is always
/// exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t_end: f64,
    n_steps: usize,
}

impl Grid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                msg: format!("must be finite and positive, got {t_end}"),
            });
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                msg: "must be at least 1".into(),
            });
        }
        Ok(Grid { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    /// Mesh width `t_end / n_steps`.
    pub fn h(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Time of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_steps);
        i as f64 * self.h()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| self.node(i))
    }

    /// Grid covering only the first `n_steps` steps of this one (same `h`).
    pub fn truncated(&self, n_steps: usize) -> Result<Self> {
        if n_steps == 0 || n_steps > self.n_steps {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                msg: format!("truncation must keep 1..={} steps", self.n_steps),
            });
        }
        Grid::new(n_steps as f64 * self.h(), n_steps)
    }

    /// Index of the node closest to `t`.
    pub fn nearest_node(&self, t: f64) -> usize {
        let i = (t / self.h()).round();
        (i.max(0.0) as usize).min(self.n_steps)
    }
}

/// Real-valued function sampled on a [`Grid`], one value per node.
///
/// Construction rejects non-finite samples, so every operator can assume its
/// input is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.n_nodes(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: i,
                context: "sample construction",
            });
        }
        Ok(SampledFn { grid, values })
    }

    /// Sample a closure on every node of `grid`.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.times().map(f).collect();
        SampledFn::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFn {
            grid,
            values: vec![0.0; grid.n_nodes()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance to another function on the same grid.
    pub fn sup_distance(&self, other: &SampledFn) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_same_grid(&self, other: &SampledFn) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "t_end {} / {} steps vs t_end {} / {} steps",
                self.grid.t_end(),
                self.grid.n_steps(),
                other.grid.t_end(),
                other.grid.n_steps()
            )));
        }
        Ok(())
    }
}

/// Pairwise summation; deterministic and with O(log n) rounding growth.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
