use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperturb::{execute, load_config, Mode};

/// Simulator for the hyperbolic turbulence model in the low Mach number regime.
#[derive(Parser)]
#[command(name = "hyperturb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one initial condition and write CSV snapshots and a report.
    Run(Common),
    /// Low Mach convergence study against the incompressible reference.
    Sweep(Common),
    /// Randomized structural checks of the model.
    Check(Common),
    /// Print the 14 wave speeds at a state and direction.
    Eigen(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let (mode, args) = match Cli::parse().command {
        Command::Run(a) => (Mode::Run, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Check(a) => (Mode::Check, a),
        Command::Eigen(a) => (Mode::Eigen, a),
    };
    let result = load_config(&args.config, mode, args.out, args.seed).and_then(|cfg| execute(&cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
