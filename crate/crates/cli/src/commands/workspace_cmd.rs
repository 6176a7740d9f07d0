//! `cdpr workspace` — first-frequency fields, sensitivity bands, and path
//! validation.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;

use cdpr_core::shaping::{ModeSpec, ShaperKind};
use cdpr_core::trajectory::bang_bang_line;
use cdpr_core::workspace::{
    first_frequency, frequency_field, in_band, validate_path, GridSpec, ShaperBand,
};

use crate::config::RobotConfig;
use crate::formats::{self, fmt_full};
use crate::parallel;
use crate::CliError;

#[derive(Debug, Args)]
pub struct WorkspaceArgs {
    /// Robot description JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Grid corner `x,y,z` (smallest coordinates).
    #[arg(long, allow_hyphen_values = true)]
    pub min: String,
    /// Opposite grid corner `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub max: String,
    /// Point counts `nx,ny,nz`. When omitted the grid is built from
    /// --spacing instead.
    #[arg(long)]
    pub dims: Option<String>,
    /// Grid spacing \[m\], used when --dims is omitted.
    #[arg(long, default_value_t = 0.05)]
    pub spacing: f64,
    /// Band tuning frequency in Hz, or `auto` to compute f1 at the path
    /// start (or the grid center without a path).
    #[arg(long, default_value = "auto")]
    pub fm1: String,
    /// Band family: zv or zvd.
    #[arg(long, default_value = "zvd")]
    pub band: String,
    /// Vibration level defining the insensitivity.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Damping ratio used for the band's shaper.
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// Write the field as CSV (x,y,z,value; NaN marks masked points).
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Write the field in the binary grid format.
    #[arg(long)]
    pub out_bin: Option<PathBuf>,
    /// Validate a straight-line path: start `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub path_from: Option<String>,
    /// Path end `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub path_to: Option<String>,
    /// Path duration. \[s\]
    #[arg(long, default_value_t = 3.0)]
    pub path_tf: f64,
    /// Write the per-sample path report as CSV.
    #[arg(long)]
    pub out_path: Option<PathBuf>,
    /// Evaluate the grid serially instead of in parallel.
    #[arg(long)]
    pub serial: bool,
}

pub fn run(args: &WorkspaceArgs) -> Result<(), CliError> {
    let robot = RobotConfig::load(&args.config)?;
    let model = robot.to_model()?;
    let limits = robot.limits();

    let min = super::parse_vec3(&args.min)?;
    let max = super::parse_vec3(&args.max)?;
    let grid = match &args.dims {
        Some(d) => GridSpec::from_bounds(min, max, super::parse_dims(d)?),
        None => {
            if args.spacing <= 0.0 || args.spacing.is_nan() {
                return Err(CliError::Config("--spacing must be positive".into()));
            }
            let mut dims = [0usize; 3];
            for i in 0..3 {
                // tolerate spans that are an exact multiple of the spacing
                // up to rounding
                dims[i] = (((max[i] - min[i]) / args.spacing + 1e-9).floor() as usize) + 1;
            }
            GridSpec {
                origin: min,
                spacing: nalgebra::Vector3::from_element(args.spacing),
                dims,
            }
        }
    };
    let dims = grid.dims;

    let kind = match args.band.as_str() {
        "zv" => ShaperKind::Zv,
        "zvd" => ShaperKind::Zvd,
        other => {
            return Err(CliError::Config(format!(
                "unknown band family `{other}` (zv or zvd)"
            )))
        }
    };

    let path = match (&args.path_from, &args.path_to) {
        (Some(from), Some(to)) => Some((super::parse_vec3(from)?, super::parse_vec3(to)?)),
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "--path-from and --path-to must be given together".into(),
            ))
        }
    };

    let f_m1 = if args.fm1 == "auto" {
        let anchor = path
            .map(|(from, _)| from)
            .unwrap_or_else(|| grid.point(dims[0] / 2, dims[1] / 2, dims[2] / 2));
        first_frequency(&model, &anchor, &limits).ok_or_else(|| {
            CliError::Config(format!(
                "auto tuning pose ({:.3}, {:.3}, {:.3}) is masked; pass --fm1 explicitly",
                anchor.x, anchor.y, anchor.z
            ))
        })?
    } else {
        args.fm1
            .parse::<f64>()
            .map_err(|e| CliError::Config(format!("--fm1: {e}")))?
    };
    if !(0.0 < args.level && args.level < 1.0) {
        return Err(CliError::Config("--level must be in (0, 1)".into()));
    }
    let band = ShaperBand::from_level(
        kind,
        &ModeSpec {
            frequency_hz: f_m1,
            damping_ratio: args.zeta,
        },
        args.level,
    );

    let field = if args.serial {
        frequency_field(&model, &grid, &limits).map_err(|e| CliError::Runtime(e.to_string()))?
    } else {
        parallel::frequency_field_parallel(&model, &grid, &limits, parallel::thread_count())?
    };

    if let Some(path_csv) = &args.out_csv {
        let mut w = BufWriter::new(File::create(path_csv)?);
        formats::write_field_csv(&mut w, &field)?;
    }
    if let Some(path_bin) = &args.out_bin {
        let mut w = BufWriter::new(File::create(path_bin)?);
        formats::write_field_binary(&mut w, &field)?;
    }

    let masked = field.masked_count();
    let members = field
        .values
        .iter()
        .filter(|v| !v.is_nan() && in_band(**v, &band))
        .count();
    let (lo, hi) = band.bounds();
    println!(
        "grid {}x{}x{} ({} points, {} masked)",
        dims[0],
        dims[1],
        dims[2],
        grid.len(),
        masked
    );
    println!(
        "{} band at f_m1 = {:.4} Hz, level {:.0}%: insensitivity {:.4} (~{:.2}), band [{:.4}, {:.4}] Hz",
        args.band,
        f_m1,
        args.level * 100.0,
        band.insensitivity,
        band.insensitivity,
        lo,
        hi
    );
    println!(
        "in-band points: {} of {} unmasked",
        members,
        grid.len() - masked
    );

    if let Some((from, to)) = path {
        let traj = bang_bang_line(&from, &to, args.path_tf, args.path_tf / 300.0)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let report = validate_path(&traj, &model, &band, &limits);
        println!(
            "path: {:.1}% of samples in band, min nu = {} Hz",
            report.in_band_fraction * 100.0,
            report
                .min_nu
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "n/a".into())
        );
        if let Some(out) = &args.out_path {
            let mut w = BufWriter::new(File::create(out)?);
            use std::io::Write;
            writeln!(w, "t,x,y,z,f1,nu,in_band")?;
            for (s, t) in report.samples.iter().zip(&traj.samples) {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    fmt_full(s.time),
                    fmt_full(t.pose.position.x),
                    fmt_full(t.pose.position.y),
                    fmt_full(t.pose.position.z),
                    s.f1.map(fmt_full).unwrap_or_else(|| "nan".into()),
                    s.nu.map(fmt_full).unwrap_or_else(|| "nan".into()),
                    u8::from(s.in_band)
                )?;
            }
        }
    }
    Ok(())
}
