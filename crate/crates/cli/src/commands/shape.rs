//! `cdpr shape` — impulse tables, sensitivity sweeps, and insensitivity.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use cdpr_core::shaping::{self, ImpulseSequence, ModeSpec, ShaperKind};

use crate::config::ShaperVariant;
use crate::formats;
use crate::CliError;

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Shaper kind: zv, zvd, zvzv, zvdzvd (or none for the unit impulse).
    #[arg(long)]
    pub kind: String,
    /// Tuning frequency for single-mode shapers. \[Hz\]
    #[arg(long)]
    pub f: Option<f64>,
    /// First tuning frequency for two-mode shapers. \[Hz\]
    #[arg(long)]
    pub f1: Option<f64>,
    /// Second tuning frequency for two-mode shapers. \[Hz\]
    #[arg(long)]
    pub f2: Option<f64>,
    /// Damping ratio of the targeted modes.
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// Vibration level for --insensitivity (fraction, e.g. 0.05).
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Print the insensitivity of a single-mode shaper at --level.
    #[arg(long)]
    pub insensitivity: bool,
    /// Write a sensitivity sweep (f/f_m in [0.5, 1.5]) to this CSV.
    #[arg(long, value_name = "CSV")]
    pub sensitivity: Option<PathBuf>,
    /// Shape a trajectory CSV through this shaper (requires --traj-out).
    #[arg(long, value_name = "CSV")]
    pub shape_traj: Option<PathBuf>,
    /// Output path for the shaped trajectory CSV.
    #[arg(long, value_name = "CSV")]
    pub traj_out: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Serialize)]
struct ImpulseJson {
    time_s: f64,
    amplitude: f64,
}

#[derive(Serialize)]
struct ShapeJson {
    kind: String,
    tuning_hz: Vec<f64>,
    zeta: f64,
    impulses: Vec<ImpulseJson>,
    delay_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    insensitivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<f64>,
}

fn resolve_modes(args: &ShapeArgs, variant: ShaperVariant) -> Result<(ModeSpec, ModeSpec), CliError> {
    let first = args.f.or(args.f1).ok_or_else(|| {
        CliError::Config("missing tuning frequency (--f or --f1)".into())
    })?;
    let second = if variant.needs_second_mode() {
        args.f2
            .ok_or_else(|| CliError::Config("two-mode shaper needs --f2".into()))?
    } else {
        args.f2.unwrap_or(first)
    };
    let mk = |f: f64| -> Result<ModeSpec, CliError> {
        let mode = ModeSpec {
            frequency_hz: f,
            damping_ratio: args.zeta,
        };
        if !mode.is_valid() {
            return Err(CliError::Config(format!(
                "invalid mode: f = {f} Hz, zeta = {}",
                args.zeta
            )));
        }
        Ok(mode)
    };
    Ok((mk(first)?, mk(second)?))
}

fn build(variant: ShaperVariant, m1: &ModeSpec, m2: &ModeSpec) -> ImpulseSequence {
    match variant {
        ShaperVariant::None => ImpulseSequence::unit(),
        ShaperVariant::Zv => shaping::zv(m1),
        ShaperVariant::Zvd => shaping::zvd(m1),
        ShaperVariant::Zvzv => shaping::zv(m1).convolve(&shaping::zv(m2)),
        ShaperVariant::Zvdzvd => shaping::zvd(m1).convolve(&shaping::zvd(m2)),
    }
}

pub fn run(args: &ShapeArgs) -> Result<(), CliError> {
    let variant = ShaperVariant::parse(&args.kind)?;
    let (mode1, mode2) = if variant == ShaperVariant::None {
        (ModeSpec::undamped(1.0), ModeSpec::undamped(1.0))
    } else {
        resolve_modes(args, variant)?
    };
    let shaper = build(variant, &mode1, &mode2);

    let insens = if args.insensitivity {
        let kind = match variant {
            ShaperVariant::Zv => ShaperKind::Zv,
            ShaperVariant::Zvd => ShaperKind::Zvd,
            _ => {
                return Err(CliError::Config(
                    "--insensitivity applies to single-mode shapers (zv, zvd)".into(),
                ))
            }
        };
        if !(0.0 < args.level && args.level < 1.0) {
            return Err(CliError::Config("--level must be in (0, 1)".into()));
        }
        Some(shaping::insensitivity(kind, &mode1, args.level))
    } else {
        None
    };

    if let Some(path) = &args.sensitivity {
        let mut rows = Vec::new();
        let mut r = 0.5;
        while r <= 1.5 + 1e-12 {
            let probe = ModeSpec {
                frequency_hz: r * mode1.frequency_hz,
                damping_ratio: mode1.damping_ratio,
            };
            rows.push((r, shaping::residual_vibration(&shaper, &probe)));
            r += 1e-3;
        }
        let mut w = BufWriter::new(File::create(path)?);
        formats::write_sensitivity_csv(&mut w, &rows)?;
    }

    if let Some(input) = &args.shape_traj {
        let out = args.traj_out.as_ref().ok_or_else(|| {
            CliError::Config("--shape-traj requires --traj-out".into())
        })?;
        let mut reader = File::open(input)
            .map_err(|e| CliError::Config(format!("cannot open {}: {e}", input.display())))?;
        let traj = formats::read_trajectory_csv(&mut reader)?;
        let shaped = shaping::shape_trajectory(&shaper, &traj);
        let mut w = BufWriter::new(File::create(out)?);
        formats::write_trajectory_csv(&mut w, &shaped)?;
    }

    if args.json {
        let payload = ShapeJson {
            kind: variant.name().to_string(),
            tuning_hz: if variant.needs_second_mode() {
                vec![mode1.frequency_hz, mode2.frequency_hz]
            } else {
                vec![mode1.frequency_hz]
            },
            zeta: args.zeta,
            impulses: shaper
                .impulses()
                .iter()
                .map(|i| ImpulseJson {
                    time_s: i.time,
                    amplitude: i.amplitude,
                })
                .collect(),
            delay_s: shaper.delay(),
            insensitivity: insens,
            level: insens.map(|_| args.level),
        };
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        println!("{} shaper ({} impulses):", variant.name(), shaper.impulses().len());
        println!("{:>4} {:>10} {:>11}", "i", "time [s]", "amplitude");
        for (i, imp) in shaper.impulses().iter().enumerate() {
            println!("{:>4} {:>10.4} {:>11.4}", i + 1, imp.time, imp.amplitude);
        }
        println!("delay: {:.4} s", shaper.delay());
        if let Some(w) = insens {
            println!(
                "insensitivity at {:.0}% level: {:.4} (~{:.2})",
                args.level * 100.0,
                w,
                w
            );
        }
    }
    Ok(())
}
