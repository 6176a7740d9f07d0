//! Subcommand implementations.

pub mod compare;
pub mod modal;
pub mod shape;
pub mod simulate;
pub mod workspace_cmd;

use nalgebra::Vector3;

use cdpr_core::Pose;

use crate::CliError;

/// Parses `x,y,z`.
pub fn parse_vec3(s: &str) -> Result<Vector3<f64>, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("cannot parse `{s}` as x,y,z: {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "expected three comma-separated values, got {} in `{s}`",
            parts.len()
        )));
    }
    Ok(Vector3::new(parts[0], parts[1], parts[2]))
}

/// Parses `x,y,z` or `x,y,z,phi,theta,psi`.
pub fn parse_pose(s: &str) -> Result<Pose, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("cannot parse pose `{s}`: {e}")))?;
    match parts.len() {
        3 => Ok(Pose::at(Vector3::new(parts[0], parts[1], parts[2]))),
        6 => Ok(Pose {
            position: Vector3::new(parts[0], parts[1], parts[2]),
            orientation: Vector3::new(parts[3], parts[4], parts[5]),
        }),
        n => Err(CliError::Config(format!(
            "pose needs 3 or 6 components, got {n} in `{s}`"
        ))),
    }
}

/// Parses `nx,ny,nz`.
pub fn parse_dims(s: &str) -> Result<[usize; 3], CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("cannot parse `{s}` as nx,ny,nz: {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "expected three comma-separated counts in `{s}`"
        )));
    }
    Ok([parts[0], parts[1], parts[2]])
}
