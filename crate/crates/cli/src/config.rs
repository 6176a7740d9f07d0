//! Robot description and scenario files (JSON, SI units).
//!
//! See docs/formats.md for the full schemas. Unknown keys are ignored so
//! configs can carry free-form `notes`.

use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use cdpr_core::control::{ControllerGains, FrictionParams};
use cdpr_core::{RobotModel, TensionLimits};

use crate::CliError;

#[derive(Debug, Deserialize)]
pub struct RobotConfig {
    pub exit_points: Vec<[f64; 3]>,
    #[serde(default)]
    pub anchor_points: Option<Vec<[f64; 3]>>,
    pub mass: f64,
    #[serde(default)]
    pub inertia: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub com_offset: Option<[f64; 3]>,
    #[serde(rename = "cable_modulus_Pa")]
    pub cable_modulus_pa: f64,
    #[serde(rename = "cable_area_m2")]
    pub cable_area_m2: f64,
    /// Identified effective axial stiffness; overrides modulus * area.
    #[serde(default, rename = "effective_EA_N")]
    pub effective_ea_n: Option<f64>,
    #[serde(default, rename = "cable_damping_Ns_per_m")]
    pub cable_damping_ns_per_m: Option<f64>,
    pub winding_ratios: Vec<f64>,
    pub winch_inertia: f64,
    pub dof: usize,
    #[serde(default)]
    pub gravity: Option<[f64; 3]>,
    #[serde(default)]
    pub tension_limits: Option<LimitsConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct LimitsConfig {
    #[serde(rename = "min_N")]
    pub min_n: f64,
    #[serde(rename = "max_N")]
    pub max_n: f64,
}

impl RobotConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_model(&self) -> Result<RobotModel, CliError> {
        let n = self.exit_points.len();
        let vec3 = |a: &[f64; 3]| Vector3::new(a[0], a[1], a[2]);
        let anchors = match &self.anchor_points {
            Some(list) => list.iter().map(vec3).collect(),
            None => vec![Vector3::zeros(); n],
        };
        let inertia = match &self.inertia {
            Some(rows) => Matrix3::from_fn(|i, j| rows[i][j]),
            None => Matrix3::zeros(),
        };
        let model = RobotModel {
            exit_points: self.exit_points.iter().map(vec3).collect(),
            anchor_points: anchors,
            platform_mass: self.mass,
            platform_inertia: inertia,
            com_offset: self.com_offset.as_ref().map(vec3).unwrap_or_default(),
            cable_modulus: self.cable_modulus_pa,
            cable_area: self.cable_area_m2,
            effective_ea: self.effective_ea_n,
            cable_damping: self.cable_damping_ns_per_m.unwrap_or(0.0),
            winding_ratios: self.winding_ratios.clone(),
            winch_inertia: self.winch_inertia,
            dof: self.dof,
            gravity: self
                .gravity
                .as_ref()
                .map(vec3)
                .unwrap_or_else(|| Vector3::new(0.0, 0.0, -9.81)),
        };
        model
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(model)
    }

    pub fn limits(&self) -> TensionLimits {
        match self.tension_limits {
            Some(l) => TensionLimits {
                min: l.min_n,
                max: l.max_n,
            },
            None => TensionLimits::default(),
        }
    }
}

/// One closed-loop run: robot, trajectory, shaper, controller, sim params.
#[derive(Debug, Deserialize)]
pub struct Scenario {
    /// Robot config path, relative to the scenario file.
    pub robot: PathBuf,
    pub trajectory: TrajectorySpec,
    pub shaper: ShaperSpec,
    pub gains: GainsSpec,
    pub friction: FrictionSpec,
    pub sim: SimSpec,
    #[serde(default)]
    pub tension_limits: Option<LimitsConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
pub struct TrajectorySpec {
    pub p1: [f64; 3],
    pub p2: [f64; 3],
    #[serde(rename = "tf_s")]
    pub tf: f64,
    #[serde(default = "default_traj_dt", rename = "dt_s")]
    pub dt: f64,
}

fn default_traj_dt() -> f64 {
    1e-3
}

/// Shaper selection. `f1_Hz` absent means auto tuning: the frequencies are
/// computed from the model at the trajectory start pose with zero damping.
#[derive(Debug, Deserialize)]
pub struct ShaperSpec {
    pub kind: ShaperVariant,
    #[serde(default, rename = "f1_Hz")]
    pub f1: Option<f64>,
    #[serde(default, rename = "f2_Hz")]
    pub f2: Option<f64>,
    #[serde(default)]
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShaperVariant {
    None,
    Zv,
    Zvd,
    Zvzv,
    Zvdzvd,
}

impl ShaperVariant {
    pub const ALL: [ShaperVariant; 5] = [
        ShaperVariant::None,
        ShaperVariant::Zv,
        ShaperVariant::Zvd,
        ShaperVariant::Zvzv,
        ShaperVariant::Zvdzvd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShaperVariant::None => "none",
            ShaperVariant::Zv => "zv",
            ShaperVariant::Zvd => "zvd",
            ShaperVariant::Zvzv => "zvzv",
            ShaperVariant::Zvdzvd => "zvdzvd",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "none" => Ok(ShaperVariant::None),
            "zv" => Ok(ShaperVariant::Zv),
            "zvd" => Ok(ShaperVariant::Zvd),
            "zvzv" => Ok(ShaperVariant::Zvzv),
            "zvdzvd" => Ok(ShaperVariant::Zvdzvd),
            other => Err(CliError::Config(format!("unknown shaper kind `{other}`"))),
        }
    }

    pub fn needs_second_mode(self) -> bool {
        matches!(self, ShaperVariant::Zvzv | ShaperVariant::Zvdzvd)
    }
}

#[derive(Debug, Deserialize)]
pub struct GainsSpec {
    pub kp: f64,
    pub kd: f64,
    pub ki: f64,
}

#[derive(Debug, Deserialize)]
pub struct FrictionSpec {
    #[serde(rename = "dry_Nm")]
    pub dry: f64,
    #[serde(rename = "viscous_Nms")]
    pub viscous: f64,
    #[serde(default)]
    pub smooth: bool,
}

#[derive(Debug, Deserialize)]
pub struct SimSpec {
    #[serde(rename = "dt_s")]
    pub dt: f64,
    #[serde(rename = "duration_s")]
    pub duration: f64,
}

impl Scenario {
    /// Loads a scenario and resolves the robot path against the scenario
    /// file's directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let robot_path = if scenario.robot.is_absolute() {
            scenario.robot.clone()
        } else {
            path.parent().unwrap_or(Path::new(".")).join(&scenario.robot)
        };
        Ok((scenario, robot_path))
    }

    pub fn gains(&self) -> ControllerGains {
        ControllerGains {
            kp: self.gains.kp,
            kd: self.gains.kd,
            ki: self.gains.ki,
        }
    }

    pub fn friction(&self, n: usize) -> FrictionParams {
        let mut fr = FrictionParams::uniform(n, self.friction.dry, self.friction.viscous);
        fr.smooth = self.friction.smooth;
        fr
    }
}
