//! `cdpr simulate` — one closed-loop run from a scenario file.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use cdpr_core::sim::VibrationMetrics;

use crate::formats;
use crate::runner::{self, VariantRun};
use crate::CliError;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (overrides the scenario's `output_dir`).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct MetricsJson {
    pub shaper: String,
    pub tuning_f1_hz: f64,
    pub tuning_f2_hz: f64,
    pub shaper_delay_s: f64,
    pub motion_end_s: f64,
    pub peak_to_peak_mps: f64,
    pub oscillation_detected: bool,
    pub window_s: [f64; 2],
    pub tail_mean_mps: f64,
    pub settling_time_s: Option<f64>,
    pub torque_start_nm: Vec<f64>,
    pub torque_end_nm: Vec<f64>,
    pub feedforward_feasible: bool,
    pub all_cables_slack: bool,
}

pub fn metrics_json(run: &VariantRun, tuning: (f64, f64)) -> MetricsJson {
    let m: &VibrationMetrics = &run.metrics;
    MetricsJson {
        shaper: run.variant.name().to_string(),
        tuning_f1_hz: tuning.0,
        tuning_f2_hz: tuning.1,
        shaper_delay_s: run.shaper.delay(),
        motion_end_s: run.motion_end,
        peak_to_peak_mps: m.peak_to_peak,
        oscillation_detected: m.oscillation_detected,
        window_s: [m.window.0, m.window.1],
        tail_mean_mps: m.tail_mean,
        settling_time_s: m.settling_time,
        torque_start_nm: m.torque_start.clone(),
        torque_end_nm: m.torque_end.clone(),
        feedforward_feasible: run.trace.feedforward_feasible,
        all_cables_slack: run.trace.all_cables_slack,
    }
}

pub fn write_run_artifacts(
    dir: &Path,
    run: &VariantRun,
    dof: usize,
    cables: usize,
    tuning: (f64, f64),
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let trace_path = dir.join(format!("trace_{}.csv", run.variant.name()));
    let mut w = BufWriter::new(File::create(trace_path)?);
    formats::write_trace_csv(&mut w, &run.trace, dof, cables)?;
    let traj_path = dir.join(format!("trajectory_{}.csv", run.variant.name()));
    let mut w = BufWriter::new(File::create(traj_path)?);
    formats::write_trajectory_csv(&mut w, &run.shaped)?;
    let metrics_path = dir.join(format!("metrics_{}.json", run.variant.name()));
    let payload = metrics_json(run, tuning);
    std::fs::write(
        metrics_path,
        serde_json::to_string_pretty(&payload).unwrap(),
    )?;
    Ok(())
}

pub fn resolve_out_dir(cli: &Option<PathBuf>, scenario: &Option<PathBuf>) -> PathBuf {
    cli.clone()
        .or_else(|| scenario.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let ls = runner::load_scenario(&args.scenario)?;
    let run = runner::run_variant(&ls, ls.scenario.shaper.kind)?;
    let dir = resolve_out_dir(&args.out_dir, &ls.scenario.output_dir);
    write_run_artifacts(
        &dir,
        &run,
        ls.model.dof,
        ls.model.cable_count(),
        ls.tuning,
    )?;
    println!(
        "{}: tuned at f1 = {:.4} Hz, f2 = {:.4} Hz (delay {:.4} s)",
        run.variant.name(),
        ls.tuning.0,
        ls.tuning.1,
        run.shaper.delay()
    );
    println!(
        "first-period peak-to-peak velocity error: {:.4e} m/s{}",
        run.metrics.peak_to_peak,
        if run.metrics.oscillation_detected {
            ""
        } else {
            " (no oscillation detected; whole-tail span)"
        }
    );
    if !run.trace.feedforward_feasible {
        println!("warning: feed-forward tensions violated the limits somewhere on the path");
    }
    if run.trace.all_cables_slack {
        println!("warning: all cables were slack simultaneously at some instant");
    }
    println!("artifacts written to {}", dir.display());
    Ok(())
}
