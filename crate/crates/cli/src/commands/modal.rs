//! `cdpr modal` — natural frequencies and mode shapes at a pose.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use cdpr_core::model::natural_frequencies;

use crate::config::RobotConfig;
use crate::CliError;

#[derive(Debug, Args)]
pub struct ModalArgs {
    /// Robot description JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Platform pose `x,y,z` or `x,y,z,phi,theta,psi`.
    #[arg(long, allow_hyphen_values = true)]
    pub pose: String,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Serialize)]
struct ModalJson {
    pose: Vec<f64>,
    frequencies_hz: Vec<f64>,
    /// One column per mode, in generalized coordinates.
    mode_shapes: Vec<Vec<f64>>,
}

pub fn run(args: &ModalArgs) -> Result<(), CliError> {
    let robot = RobotConfig::load(&args.config)?;
    let model = robot.to_model()?;
    let pose = super::parse_pose(&args.pose)?;
    let modal = natural_frequencies(&model, &pose).map_err(|e| CliError::Runtime(e.to_string()))?;

    if args.json {
        let m = model.dof;
        let shapes: Vec<Vec<f64>> = (0..m)
            .map(|c| modal.mode_shapes.column(c).iter().copied().collect())
            .collect();
        let payload = ModalJson {
            pose: {
                let mut v = vec![pose.position.x, pose.position.y, pose.position.z];
                if m > 3 {
                    v.extend([pose.orientation.x, pose.orientation.y, pose.orientation.z]);
                }
                v
            },
            frequencies_hz: modal.frequencies_hz.clone(),
            mode_shapes: shapes,
        };
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!(
            "natural frequencies at ({:.4}, {:.4}, {:.4}):",
            pose.position.x, pose.position.y, pose.position.z
        );
        for (i, f) in modal.frequencies_hz.iter().enumerate() {
            println!("  f{} = {:.4} Hz", i + 1, f);
        }
        println!("mode shapes (one column per mode):");
        for r in 0..model.dof {
            let row: Vec<String> = (0..model.dof)
                .map(|c| format!("{:>8.4}", modal.mode_shapes[(r, c)]))
                .collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
