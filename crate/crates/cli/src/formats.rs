//! File formats: trajectory/trace/sensitivity/field CSV and the binary grid.
//!
//! Machine-format floats carry 17 significant digits (`{:.16e}`); byte
//! layouts are documented in docs/formats.md. All multi-byte binary values
//! are little-endian.

use std::io::{self, Read, Write};

use nalgebra::Vector3;

use cdpr_core::model::{Pose, Twist};
use cdpr_core::sim::SimulationTrace;
use cdpr_core::trajectory::{PlatformTrajectory, TrajectorySample};
use cdpr_core::workspace::{GridSpec, ScalarField};

use crate::CliError;

/// 17-significant-digit float for machine CSV output.
pub fn fmt_full(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub const TRAJECTORY_HEADER: &str =
    "t,x,y,z,phi,theta,psi,vx,vy,vz,wx,wy,wz,ax,ay,az,alx,aly,alz";

pub fn write_trajectory_csv(w: &mut dyn Write, traj: &PlatformTrajectory) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in &traj.samples {
        let cols = [
            s.time,
            s.pose.position.x,
            s.pose.position.y,
            s.pose.position.z,
            s.pose.orientation.x,
            s.pose.orientation.y,
            s.pose.orientation.z,
            s.twist.linear.x,
            s.twist.linear.y,
            s.twist.linear.z,
            s.twist.angular.x,
            s.twist.angular.y,
            s.twist.angular.z,
            s.accel.linear.x,
            s.accel.linear.y,
            s.accel.linear.z,
            s.accel.angular.x,
            s.accel.angular.y,
            s.accel.angular.z,
        ];
        let line: Vec<String> = cols.iter().map(|&v| fmt_full(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_trajectory_csv(r: &mut dyn Read) -> Result<PlatformTrajectory, CliError> {
    let mut text = String::new();
    r.read_to_string(&mut text)
        .map_err(|e| CliError::Config(format!("trajectory csv: {e}")))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("trajectory csv: empty file".into()))?;
    if header.trim() != TRAJECTORY_HEADER {
        return Err(CliError::Config(format!(
            "trajectory csv: expected header `{TRAJECTORY_HEADER}`"
        )));
    }
    let mut samples = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("trajectory csv line {}: {e}", no + 2)))?;
        if vals.len() != 19 {
            return Err(CliError::Config(format!(
                "trajectory csv line {}: expected 19 columns, got {}",
                no + 2,
                vals.len()
            )));
        }
        samples.push(TrajectorySample {
            time: vals[0],
            pose: Pose {
                position: Vector3::new(vals[1], vals[2], vals[3]),
                orientation: Vector3::new(vals[4], vals[5], vals[6]),
            },
            twist: Twist {
                linear: Vector3::new(vals[7], vals[8], vals[9]),
                angular: Vector3::new(vals[10], vals[11], vals[12]),
            },
            accel: Twist {
                linear: Vector3::new(vals[13], vals[14], vals[15]),
                angular: Vector3::new(vals[16], vals[17], vals[18]),
            },
        });
    }
    if samples.len() < 2 {
        return Err(CliError::Config(
            "trajectory csv: need at least two samples".into(),
        ));
    }
    let dt = samples[1].time - samples[0].time;
    for k in 1..samples.len() {
        let expect = samples[0].time + k as f64 * dt;
        if (samples[k].time - expect).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "trajectory csv: non-uniform timestamps at row {}",
                k + 2
            )));
        }
    }
    Ok(PlatformTrajectory { dt, samples })
}

pub fn write_sensitivity_csv(w: &mut dyn Write, rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "normalized_frequency,vibration_fraction")?;
    for &(r, v) in rows {
        writeln!(w, "{},{}", fmt_full(r), fmt_full(v))?;
    }
    Ok(())
}

pub fn write_field_csv(w: &mut dyn Write, field: &ScalarField) -> io::Result<()> {
    writeln!(w, "x,y,z,value")?;
    let g = &field.grid;
    for ix in 0..g.dims[0] {
        for iy in 0..g.dims[1] {
            for iz in 0..g.dims[2] {
                let p = g.point(ix, iy, iz);
                let v = field.values[g.index(ix, iy, iz)];
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_full(p.x),
                    fmt_full(p.y),
                    fmt_full(p.z),
                    fmt_full(v)
                )?;
            }
        }
    }
    Ok(())
}

/// Binary grid layout (all little-endian):
/// magic `CGRD` (4 bytes), version u32, dims 3 x u32, origin 3 x f64,
/// spacing 3 x f64, then `nx*ny*nz` f64 values row-major (x slowest,
/// z fastest). Masked points are NaN.
pub const GRID_MAGIC: &[u8; 4] = b"CGRD";
pub const GRID_VERSION: u32 = 1;

pub fn write_field_binary(w: &mut dyn Write, field: &ScalarField) -> io::Result<()> {
    w.write_all(GRID_MAGIC)?;
    w.write_all(&GRID_VERSION.to_le_bytes())?;
    for d in field.grid.dims {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    for i in 0..3 {
        w.write_all(&field.grid.origin[i].to_le_bytes())?;
    }
    for i in 0..3 {
        w.write_all(&field.grid.spacing[i].to_le_bytes())?;
    }
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field_binary(r: &mut dyn Read) -> Result<ScalarField, CliError> {
    let bad = |msg: &str| CliError::Config(format!("binary grid: {msg}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad("truncated magic"))?;
    if &magic != GRID_MAGIC {
        return Err(bad("wrong magic"));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(|_| bad("truncated version"))?;
    if u32::from_le_bytes(u32buf) != GRID_VERSION {
        return Err(bad("unsupported version"));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        r.read_exact(&mut u32buf).map_err(|_| bad("truncated dims"))?;
        *d = u32::from_le_bytes(u32buf) as usize;
    }
    let mut f64buf = [0u8; 8];
    let mut origin = Vector3::zeros();
    for i in 0..3 {
        r.read_exact(&mut f64buf).map_err(|_| bad("truncated origin"))?;
        origin[i] = f64::from_le_bytes(f64buf);
    }
    let mut spacing = Vector3::zeros();
    for i in 0..3 {
        r.read_exact(&mut f64buf)
            .map_err(|_| bad("truncated spacing"))?;
        spacing[i] = f64::from_le_bytes(f64buf);
    }
    let total = dims[0] * dims[1] * dims[2];
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        r.read_exact(&mut f64buf)
            .map_err(|_| bad("truncated values"))?;
        values.push(f64::from_le_bytes(f64buf));
    }
    Ok(ScalarField {
        grid: GridSpec {
            origin,
            spacing,
            dims,
        },
        values,
    })
}

/// Trace CSV columns (see docs/formats.md): time, desired pose (m cols),
/// desired twist (m), actual pose (m), actual twist (m), then per-winch
/// blocks qd, q, tau, gamma_d, gamma_f, gamma_corr, gamma, and delta_zdot.
pub fn write_trace_csv(
    w: &mut dyn Write,
    trace: &SimulationTrace,
    dof: usize,
    cables: usize,
) -> io::Result<()> {
    let pose_names = ["x", "y", "z", "phi", "theta", "psi"];
    let twist_names = ["vx", "vy", "vz", "wx", "wy", "wz"];
    let mut header = vec!["t".to_string()];
    for &n in pose_names.iter().take(dof) {
        header.push(format!("{n}_d"));
    }
    for &n in twist_names.iter().take(dof) {
        header.push(format!("{n}_d"));
    }
    header.extend(pose_names.iter().take(dof).map(|n| n.to_string()));
    header.extend(twist_names.iter().take(dof).map(|n| n.to_string()));
    for block in ["qd", "q", "tau", "gamma_d", "gamma_f", "gamma_corr", "gamma"] {
        for i in 1..=cables {
            header.push(format!("{block}{i}"));
        }
    }
    header.push("delta_zdot".to_string());
    writeln!(w, "{}", header.join(","))?;

    let pose_cols = |p: &Pose| -> Vec<f64> {
        [
            p.position.x,
            p.position.y,
            p.position.z,
            p.orientation.x,
            p.orientation.y,
            p.orientation.z,
        ][..dof]
            .to_vec()
    };
    let twist_cols = |t: &Twist| -> Vec<f64> {
        [
            t.linear.x, t.linear.y, t.linear.z, t.angular.x, t.angular.y, t.angular.z,
        ][..dof]
            .to_vec()
    };
    for r in &trace.records {
        let mut cols = vec![r.time];
        cols.extend(pose_cols(&r.desired_pose));
        cols.extend(twist_cols(&r.desired_twist));
        cols.extend(pose_cols(&r.actual_pose));
        cols.extend(twist_cols(&r.actual_twist));
        cols.extend(&r.q_desired);
        cols.extend(&r.q);
        cols.extend(&r.tensions);
        cols.extend(&r.torque_ff);
        cols.extend(&r.torque_friction);
        cols.extend(&r.torque_correction);
        cols.extend(&r.torque);
        cols.push(r.velocity_error_z);
        let line: Vec<String> = cols.iter().map(|&v| fmt_full(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
