use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zhs_cli::{execute, Mode};

#[derive(Parser)]
#[command(
    name = "zhs",
    version,
    about = "Peakon and kink solutions of the two-component 0-HS system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a multipeakon initial state
    SimulatePeakon(Common),
    /// Integrate a multikink initial state
    SimulateKink(Common),
    /// Weak and ODE residual checks of a trajectory
    Verify(Common),
    /// Apply a symmetry and re-verify the image
    Symmetry(Common),
    /// Compare the integrator with a closed-form solution
    ClosedForm(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the verification battery seed
    #[arg(long)]
    seed: Option<u64>,
    /// Print nothing on success
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::SimulatePeakon(a) => (Mode::SimulatePeakon, a),
        Command::SimulateKink(a) => (Mode::SimulateKink, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Symmetry(a) => (Mode::Symmetry, a),
        Command::ClosedForm(a) => (Mode::ClosedForm, a),
    };
    match execute(mode, &args.config, &args.out, args.seed) {
        Ok(outcome) => {
            if !args.quiet {
                println!(
                    "{}: {}",
                    mode.name(),
                    if outcome.status.exit_code() == 0 {
                        "pass"
                    } else {
                        "fail"
                    }
                );
                for f in &outcome.files {
                    println!("  wrote {}", f.display());
                }
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("zhs: {} error: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}
