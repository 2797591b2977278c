//! Solution CSV format: UTF-8, `\n` line endings, header `t,x`, one row per
//! node with 17 significant digits, and `#`-prefixed trailer comments for
//! diagnostics. Writes are atomic (temp file + rename).

use anyhow::{bail, Context, Result};
use fractosc_core::solver::SolutionTrace;
use fractosc_core::{Grid, SampledFn};
use std::io::Write;
use std::path::Path;

pub fn render_solution(trace: &SolutionTrace) -> String {
    let mut out = String::from("t,x\n");
    let grid = trace.x.grid();
    for (i, v) in trace.x.values().iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e}\n", grid.node(i), v));
    }
    if let Some(node) = trace.diverged_at {
        out.push_str(&format!("# diverged_at={node}\n"));
    }
    out
}

/// Write atomically: a temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => {
            std::fs::create_dir_all(d)
                .with_context(|| format!("creating output directory {}", d.display()))?;
            tempfile::NamedTempFile::new_in(d)
        }
        None => tempfile::NamedTempFile::new_in("."),
    }
    .context("creating temp file")?;
    tmp.write_all(contents.as_bytes()).context("writing")?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Parsed solution file: the trace and the diverged-at trailer if present.
pub struct ParsedSolution {
    pub x: SampledFn,
    pub diverged_at: Option<usize>,
}

pub fn read_solution(path: &Path) -> Result<ParsedSolution> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading solution csv {}", path.display()))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut diverged_at = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("diverged_at=") {
                diverged_at = Some(v.trim().parse().context("parsing diverged_at trailer")?);
            }
            continue;
        }
        if lineno == 0 {
            if line != "t,x" {
                bail!("expected header `t,x`, found `{line}`");
            }
            continue;
        }
        let (t, x) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected `t,x` pair", lineno + 1))?;
        times.push(t.trim().parse::<f64>().context("parsing t")?);
        values.push(x.trim().parse::<f64>().context("parsing x")?);
    }
    if times.len() < 2 {
        bail!("solution csv holds fewer than 2 rows");
    }
    if times[0] != 0.0 {
        bail!("solution grid must start at t = 0, found {}", times[0]);
    }
    let n = times.len() - 1;
    let h = times[1] - times[0];
    if !(h > 0.0) {
        bail!("non-increasing time column");
    }
    for (i, &t) in times.iter().enumerate() {
        if (t - i as f64 * h).abs() > 1e-9 * times[n].max(1.0) {
            bail!("time column is not a uniform grid at row {}", i + 1);
        }
    }
    let grid = Grid::new(times[n], n).map_err(|e| anyhow::anyhow!("grid: {e}"))?;
    let x = SampledFn::new(grid, values).map_err(|e| anyhow::anyhow!("samples: {e}"))?;
    Ok(ParsedSolution { x, diverged_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fractosc_core::solver::SolutionTrace;

    #[test]
    fn round_trip_preserves_bits() {
        let grid = Grid::new(1.0, 16).unwrap();
        let x = SampledFn::from_fn(grid, |t| (t * 3.7).sin() / 3.0).unwrap();
        let trace = SolutionTrace {
            x: x.clone(),
            residual_norm: 0.0,
            diverged_at: None,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.csv");
        write_atomic(&path, &render_solution(&trace)).unwrap();
        let parsed = read_solution(&path).unwrap();
        assert_eq!(parsed.x.values(), x.values());
        assert!(parsed.diverged_at.is_none());
    }

    #[test]
    fn trailer_comment_is_parsed() {
        let grid = Grid::new(1.0, 4).unwrap();
        let trace = SolutionTrace {
            x: SampledFn::zeros(grid),
            residual_norm: 0.0,
            diverged_at: Some(4),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.csv");
        write_atomic(&path, &render_solution(&trace)).unwrap();
        let parsed = read_solution(&path).unwrap();
        assert_eq!(parsed.diverged_at, Some(4));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_solution(&path).is_err());
        std::fs::write(&path, "t,x\n0,1\n0.5,2\n1.7,3\n").unwrap();
        assert!(read_solution(&path).is_err()); // non-uniform
    }
}
