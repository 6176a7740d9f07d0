//! `cdpr compare` — all five shaper variants on one scenario, side by side
//! with the prototype reference numbers.

use std::path::PathBuf;

use clap::Args;

use crate::config::ShaperVariant;
use crate::parallel;
use crate::report;
use crate::runner;
use crate::CliError;

use super::simulate::{resolve_out_dir, write_run_artifacts};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Scenario JSON; its `shaper.kind` is ignored, every variant runs.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (overrides the scenario's `output_dir`).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn run(args: &CompareArgs) -> Result<(), CliError> {
    let ls = runner::load_scenario(&args.scenario)?;
    let runs = runner::run_variants(&ls, &ShaperVariant::ALL, parallel::thread_count())?;

    let dir = resolve_out_dir(&args.out_dir, &ls.scenario.output_dir);
    for run in &runs {
        write_run_artifacts(&dir, run, ls.model.dof, ls.model.cable_count(), ls.tuning)?;
    }
    let rep = report::build_report(&runs, ls.scenario.trajectory.tf);
    let table = report::render_table(&rep);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("compare.txt"), &table)?;
    std::fs::write(
        dir.join("compare.json"),
        serde_json::to_string_pretty(&rep).unwrap(),
    )?;

    println!(
        "tuning: f1 = {:.4} Hz, f2 = {:.4} Hz (start pose)",
        ls.tuning.0, ls.tuning.1
    );
    print!("{table}");
    println!("artifacts written to {}", dir.display());
    Ok(())
}
