use clap::{Parser, Subcommand};
use fractosc_cli::commands::{cmd_analyze, cmd_reproduce, cmd_solve, GlobalOpts};
use std::path::PathBuf;
use std::process::ExitCode;

/// Multi-term fractional differential equation solver and oscillation
/// diagnostics.
#[derive(Parser)]
#[command(name = "fractosc", version, about)]
struct Cli {
    /// Output directory (falls back to $FRACTOSC_OUT, then the current
    /// directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Override the spec's grid step count.
    #[arg(long, global = true)]
    grid_steps: Option<usize>,

    /// Reserved; no command uses randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem spec and write the solution CSV.
    Solve { spec: PathBuf },
    /// Run the spec's requested checks against a solution CSV.
    Analyze { spec: PathBuf, csv: PathBuf },
    /// Reproduce one of the built-in simulation runs (1-4).
    Reproduce { figure: u32 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out_dir
        .or_else(|| std::env::var_os("FRACTOSC_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = GlobalOpts {
        out_dir,
        grid_steps: cli.grid_steps,
    };
    let result = match cli.command {
        Command::Solve { spec } => cmd_solve(&spec, &opts),
        Command::Analyze { spec, csv } => cmd_analyze(&spec, &csv, &opts),
        Command::Reproduce { figure } => cmd_reproduce(figure, &opts),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
