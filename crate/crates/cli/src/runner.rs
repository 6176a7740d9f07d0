//! Scenario execution shared by `simulate`, `compare`, and the test suites.

use std::path::Path;

use cdpr_core::model::natural_frequencies;
use cdpr_core::shaping::{self, ImpulseSequence, ModeSpec};
use cdpr_core::sim::{self, SimulationConfig, SimulationTrace, VibrationMetrics};
use cdpr_core::trajectory::{bang_bang_line, PlatformTrajectory};
use cdpr_core::{Pose, RobotModel, TensionLimits};
use nalgebra::Vector3;

use crate::config::{RobotConfig, Scenario, ShaperVariant};
use crate::CliError;

/// A scenario with everything resolved: model, nominal trajectory, and the
/// shaper tuning frequencies.
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub model: RobotModel,
    pub limits: TensionLimits,
    pub nominal: PlatformTrajectory,
    /// First and second tuning frequencies \[Hz\] (auto: modal analysis at the
    /// trajectory start pose).
    pub tuning: (f64, f64),
    pub zeta: f64,
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, CliError> {
    let (scenario, robot_path) = Scenario::load(path)?;
    let robot = RobotConfig::load(&robot_path)?;
    let model = robot.to_model()?;
    let limits = match scenario.tension_limits {
        Some(l) => TensionLimits {
            min: l.min_n,
            max: l.max_n,
        },
        None => robot.limits(),
    };

    let t = &scenario.trajectory;
    if scenario.sim.duration < t.tf {
        return Err(CliError::Config(format!(
            "sim duration {} s is shorter than the trajectory time {} s",
            scenario.sim.duration, t.tf
        )));
    }
    let p1 = Vector3::new(t.p1[0], t.p1[1], t.p1[2]);
    let p2 = Vector3::new(t.p2[0], t.p2[1], t.p2[2]);
    let nominal = bang_bang_line(&p1, &p2, t.tf, t.dt)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let zeta = scenario.shaper.zeta.unwrap_or(0.0);
    let tuning = match (scenario.shaper.f1, scenario.shaper.f2) {
        (Some(f1), f2) => {
            if scenario.shaper.kind.needs_second_mode() && f2.is_none() {
                return Err(CliError::Config(
                    "two-mode shaper needs f2_Hz (or auto tuning)".into(),
                ));
            }
            (f1, f2.unwrap_or(f1))
        }
        (None, _) => {
            let modal = natural_frequencies(&model, &Pose::at(p1))
                .map_err(|e| CliError::Config(e.to_string()))?;
            let f = &modal.frequencies_hz;
            if f.len() < 2 && scenario.shaper.kind.needs_second_mode() {
                return Err(CliError::Config(
                    "model has fewer than two modes; cannot auto-tune a two-mode shaper".into(),
                ));
            }
            (f[0], if f.len() > 1 { f[1] } else { f[0] })
        }
    };

    Ok(LoadedScenario {
        scenario,
        model,
        limits,
        nominal,
        tuning,
        zeta,
    })
}

pub fn build_shaper(ls: &LoadedScenario, variant: ShaperVariant) -> ImpulseSequence {
    let mode1 = ModeSpec {
        frequency_hz: ls.tuning.0,
        damping_ratio: ls.zeta,
    };
    let mode2 = ModeSpec {
        frequency_hz: ls.tuning.1,
        damping_ratio: ls.zeta,
    };
    match variant {
        ShaperVariant::None => ImpulseSequence::unit(),
        ShaperVariant::Zv => shaping::zv(&mode1),
        ShaperVariant::Zvd => shaping::zvd(&mode1),
        ShaperVariant::Zvzv => shaping::zv(&mode1).convolve(&shaping::zv(&mode2)),
        ShaperVariant::Zvdzvd => shaping::zvd(&mode1).convolve(&shaping::zvd(&mode2)),
    }
}

/// One executed variant: shaped trajectory, trace, and metrics. The metrics
/// window opens at this variant's own motion end (trajectory time plus
/// shaper delay).
pub struct VariantRun {
    pub variant: ShaperVariant,
    pub shaper: ImpulseSequence,
    pub shaped: PlatformTrajectory,
    pub motion_end: f64,
    pub trace: SimulationTrace,
    pub metrics: VibrationMetrics,
}

pub fn run_variant(ls: &LoadedScenario, variant: ShaperVariant) -> Result<VariantRun, CliError> {
    let shaper = build_shaper(ls, variant);
    let shaped = shaping::shape_trajectory(&shaper, &ls.nominal);
    if ls.scenario.sim.duration < shaped.duration() {
        return Err(CliError::Config(format!(
            "sim duration {} s does not cover the shaped motion ({} s)",
            ls.scenario.sim.duration,
            shaped.duration()
        )));
    }
    let cfg = SimulationConfig {
        gains: ls.scenario.gains(),
        friction: ls.scenario.friction(ls.model.cable_count()),
        limits: ls.limits,
        dt: ls.scenario.sim.dt,
        duration: ls.scenario.sim.duration,
        lock_winches: false,
        bilateral_cables: false,
    };
    let trace: SimulationTrace =
        sim::simulate(&ls.model, &cfg, &shaped).map_err(|e| CliError::Runtime(e.to_string()))?;
    let motion_end = ls.scenario.trajectory.tf + shaper.delay();
    let metrics =
        sim::metrics(&trace, motion_end).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(VariantRun {
        variant,
        shaper,
        shaped,
        motion_end,
        trace,
        metrics,
    })
}

/// Runs several variants concurrently (at most `threads` at a time) with a
/// deterministic result order.
pub fn run_variants(
    ls: &LoadedScenario,
    variants: &[ShaperVariant],
    threads: usize,
) -> Result<Vec<VariantRun>, CliError> {
    let mut out: Vec<Option<Result<VariantRun, CliError>>> =
        (0..variants.len()).map(|_| None).collect();
    let threads = threads.max(1);
    for batch in (0..variants.len()).collect::<Vec<_>>().chunks(threads) {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for &i in batch {
                let variant = variants[i];
                handles.push((i, scope.spawn(move || run_variant(ls, variant))));
            }
            for (i, h) in handles {
                out[i] = Some(h.join().expect("variant worker panicked"));
            }
        });
    }
    out.into_iter().map(|r| r.unwrap()).collect()
}
