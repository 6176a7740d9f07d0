//! First-natural-frequency fields over Cartesian grids, shaper sensitivity
//! bands, and path validation.
//!
//! A shaper tuned at `f_m1` tolerates first-frequency variation inside the
//! band `[1 - I/2, 1 + I/2] * f_m1`, where `I` is its insensitivity at the
//! chosen vibration level. The set of platform positions whose `f_1` stays
//! inside that band is the shaper sensitivity workspace; the index `nu`
//! measures the distance (in Hz) to the nearer band edge, negative outside.

use alloc::vec::Vec;
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::model::{self, Pose, RobotModel, Twist};
use crate::shaping::{self, ModeSpec, ShaperKind};
use crate::tension::{self, TensionLimits};
use crate::trajectory::PlatformTrajectory;

/// Regular Cartesian grid: values are stored row-major with x slowest,
/// z fastest (`index = (ix * ny + iy) * nz + iz`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub origin: Vector3<f64>,
    pub spacing: Vector3<f64>,
    pub dims: [usize; 3],
}

impl GridSpec {
    /// Grid spanning `[min, max]` with the given point counts per axis.
    /// Axes with a single point get zero spacing.
    pub fn from_bounds(min: Vector3<f64>, max: Vector3<f64>, dims: [usize; 3]) -> Self {
        let mut spacing = Vector3::zeros();
        for i in 0..3 {
            spacing[i] = if dims[i] > 1 {
                (max[i] - min[i]) / (dims[i] - 1) as f64
            } else {
                0.0
            };
        }
        GridSpec {
            origin: min,
            spacing,
            dims,
        }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    pub fn point(&self, ix: usize, iy: usize, iz: usize) -> Vector3<f64> {
        self.origin
            + Vector3::new(
                ix as f64 * self.spacing.x,
                iy as f64 * self.spacing.y,
                iz as f64 * self.spacing.z,
            )
    }
}

/// Scalar samples on a [`GridSpec`]. Masked points (degenerate geometry or
/// statically infeasible tensions) hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn masked_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }
}

/// First natural frequency at a platform position, or `None` where the
/// model degenerates or static equilibrium needs infeasible tensions.
pub fn first_frequency(
    model: &RobotModel,
    position: &Vector3<f64>,
    limits: &TensionLimits,
) -> Option<f64> {
    let pose = Pose::at(*position);
    let w_ex = model::gravity_wrench(model, &pose);
    let w_f = tension::feedforward_wrench(model, &Twist::zero(), &Twist::zero(), &w_ex);
    match tension::solve_tensions(model, &pose, &w_f, limits) {
        Ok(sp) if sp.feasible => {}
        _ => return None,
    }
    model::natural_frequencies(model, &pose)
        .ok()
        .and_then(|m| m.frequencies_hz.first().copied())
}

/// Evaluates `f_1` at every grid point, serially in storage order. The
/// result is a pure function of the inputs, so any parallel driver writing
/// the same per-point values into the same slots reproduces it bit for bit.
pub fn frequency_field(
    model: &RobotModel,
    grid: &GridSpec,
    limits: &TensionLimits,
) -> Result<ScalarField> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut values = alloc::vec![f64::NAN; grid.len()];
    for ix in 0..grid.dims[0] {
        for iy in 0..grid.dims[1] {
            for iz in 0..grid.dims[2] {
                let p = grid.point(ix, iy, iz);
                if let Some(f1) = first_frequency(model, &p, limits) {
                    values[grid.index(ix, iy, iz)] = f1;
                }
            }
        }
    }
    Ok(ScalarField {
        grid: grid.clone(),
        values,
    })
}

/// A shaper's admissible first-frequency band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShaperBand {
    /// Tuning frequency. \[Hz\]
    pub f_m1: f64,
    /// Insensitivity: width of the admissible normalized-frequency interval.
    pub insensitivity: f64,
    pub kind: ShaperKind,
}

impl ShaperBand {
    /// Band for a shaper family tuned at `mode`, using the computed
    /// insensitivity at `level` (e.g. 0.05 for the five-percent band).
    pub fn from_level(kind: ShaperKind, mode: &ModeSpec, level: f64) -> Self {
        ShaperBand {
            f_m1: mode.frequency_hz,
            insensitivity: shaping::insensitivity(kind, mode, level),
            kind,
        }
    }

    /// Lower and upper band edges in Hz.
    pub fn bounds(&self) -> (f64, f64) {
        (
            (1.0 - self.insensitivity / 2.0) * self.f_m1,
            (1.0 + self.insensitivity / 2.0) * self.f_m1,
        )
    }
}

/// Band membership `1 - I/2 <= f1/f_m1 <= 1 + I/2`, bounds inclusive.
pub fn in_band(f1: f64, band: &ShaperBand) -> bool {
    let (lo, hi) = band.bounds();
    f1 >= lo && f1 <= hi
}

/// Distance from `f1` to the nearer band edge, negative outside the band:
/// `nu = min(f1 - lo, hi - f1)`. \[Hz\]
pub fn robustness_index(f1: f64, band: &ShaperBand) -> f64 {
    let (lo, hi) = band.bounds();
    (f1 - lo).min(hi - f1)
}

/// Per-sample band check along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub time: f64,
    pub f1: Option<f64>,
    pub nu: Option<f64>,
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub samples: Vec<PathSample>,
    /// Fraction of samples inside the band (masked samples count as out).
    pub in_band_fraction: f64,
    /// Smallest robustness index along the path, `None` if every sample is
    /// masked.
    pub min_nu: Option<f64>,
}

/// Evaluates `f_1` and the robustness index at every trajectory sample.
pub fn validate_path(
    traj: &PlatformTrajectory,
    model: &RobotModel,
    band: &ShaperBand,
    limits: &TensionLimits,
) -> PathReport {
    let mut samples = Vec::with_capacity(traj.samples.len());
    let mut inside = 0usize;
    let mut min_nu: Option<f64> = None;
    for s in &traj.samples {
        let f1 = first_frequency(model, &s.pose.position, limits);
        let (nu, is_in) = match f1 {
            Some(f) => {
                let nu = robustness_index(f, band);
                (Some(nu), in_band(f, band))
            }
            None => (None, false),
        };
        if is_in {
            inside += 1;
        }
        if let Some(v) = nu {
            min_nu = Some(min_nu.map_or(v, |m: f64| m.min(v)));
        }
        samples.push(PathSample {
            time: s.time,
            f1,
            nu,
            in_band: is_in,
        });
    }
    let in_band_fraction = if samples.is_empty() {
        0.0
    } else {
        inside as f64 / samples.len() as f64
    };
    PathReport {
        samples,
        in_band_fraction,
        min_nu,
    }
}
