use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cdpr_cli::commands::{compare, modal, shape, simulate, workspace_cmd};
use cdpr_cli::CliError;

/// Cable-driven parallel robot modeling, input shaping, and closed-loop
/// simulation.
#[derive(Parser)]
#[command(name = "cdpr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Natural frequencies and mode shapes at a pose.
    Modal(modal::ModalArgs),
    /// Impulse tables, sensitivity curves, insensitivity.
    Shape(shape::ShapeArgs),
    /// One closed-loop run from a scenario file.
    Simulate(simulate::SimulateArgs),
    /// All shaper variants on one scenario, with reference numbers.
    Compare(compare::CompareArgs),
    /// First-frequency fields, sensitivity bands, path validation.
    Workspace(workspace_cmd::WorkspaceArgs),
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Modal(args) => modal::run(args),
        Command::Shape(args) => shape::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Workspace(args) => workspace_cmd::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("cdpr: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
