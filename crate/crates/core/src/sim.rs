//! Virtual elastic-cable plant, fixed-step RK4 integration, traces, and
//! vibration metrics.
//!
//! The plant couples three subsystems:
//!
//! - platform: `M t_dot = A^T tau + w_ex - C t`;
//! - cables: `tau_i = max(0, k_i (l_i - l0_i) + c (l_dot_i - l0_dot_i))`
//!   with `k_i = EA / l0_i` and unstretched length `l0_i = base_i - chi_i
//!   q_i` (winding in shortens the unstretched cable);
//! - winches: `I_m q_ddot = Gamma - Gamma_f(q_dot) - chi tau`.
//!
//! The torque set-point is refreshed at 1 kHz (zero-order hold) while the
//! plant integrates at `dt`. Simulations start from the static equilibrium
//! at the first trajectory pose: cables are pre-stretched so the hover
//! tensions balance gravity exactly, which keeps an undisturbed run at rest
//! to machine precision.

use alloc::vec::Vec;
use nalgebra::DVector;
#[cfg_attr(test, allow(unused_imports))] // inherent methods cover tests
use num_traits::Float;

use crate::control::{self, ControllerGains, FrictionParams, PlantState};
use crate::error::{Error, Result};
use crate::model::{self, Pose, RobotModel, Twist};
use crate::tension::{self, TensionLimits};
use crate::trajectory::PlatformTrajectory;

/// Zero-order hold period of the torque controller. \[s\]
pub const CONTROLLER_PERIOD: f64 = 1e-3;

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Simulation parameters bundled with the controller configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub gains: ControllerGains,
    pub friction: FrictionParams,
    pub limits: TensionLimits,
    /// Plant integration step; must not exceed [`CONTROLLER_PERIOD`]. \[s\]
    pub dt: f64,
    /// Total simulated time; must cover the trajectory. \[s\]
    pub duration: f64,
    /// Freeze the winches (ideal position sources). Useful as the boundary
    /// condition matching the locked-winch modal analysis.
    pub lock_winches: bool,
    /// Let cable tension go negative (pure linear springs) instead of
    /// clamping at slack. Test-rig option for conservation checks.
    pub bilateral_cables: bool,
}

/// One integration step of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub desired_pose: Pose,
    pub desired_twist: Twist,
    pub actual_pose: Pose,
    pub actual_twist: Twist,
    pub q_desired: Vec<f64>,
    pub q: Vec<f64>,
    pub q_rates: Vec<f64>,
    pub tensions: Vec<f64>,
    pub torque_ff: Vec<f64>,
    pub torque_friction: Vec<f64>,
    pub torque_correction: Vec<f64>,
    pub torque: Vec<f64>,
    /// `delta z_dot`: desired minus simulated vertical velocity. \[m/s\]
    pub velocity_error_z: f64,
}

/// Full simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub dt: f64,
    pub records: Vec<TraceRecord>,
    /// True if every cable was slack simultaneously at some step.
    pub all_cables_slack: bool,
    /// False if any feed-forward tension solve along the trajectory
    /// violated the limits (the unconstrained solution was used).
    pub feedforward_feasible: bool,
}

/// Static equilibrium at a pose: hover tensions from the tension module and
/// cables pre-stretched to carry them (`l0 = l EA / (EA + tau)`). Returns
/// the plant state and the unstretched-length baseline.
pub fn equilibrium_state(
    model: &RobotModel,
    pose: &Pose,
    limits: &TensionLimits,
) -> Result<(PlantState, Vec<f64>)> {
    let n = model.cable_count();
    let w_ex = model::gravity_wrench(model, pose);
    let w_f = tension::feedforward_wrench(model, &Twist::zero(), &Twist::zero(), &w_ex);
    let sp = tension::solve_tensions(model, pose, &w_f, limits)?;
    let geom = model::cable_geometry(model, pose)?;
    let ea = model.cable_ea();
    let base: Vec<f64> = geom
        .iter()
        .zip(sp.tensions.iter())
        .map(|(g, &tau)| g.length * ea / (ea + tau))
        .collect();
    let state = PlantState {
        pose: *pose,
        twist: Twist::zero(),
        winch_angles: DVector::zeros(n),
        winch_rates: DVector::zeros(n),
        integral_error: DVector::zeros(n),
    };
    Ok((state, base))
}

/// Runs the closed loop from the static equilibrium at the trajectory start.
pub fn simulate(
    model: &RobotModel,
    cfg: &SimulationConfig,
    traj: &PlatformTrajectory,
) -> Result<SimulationTrace> {
    let (state, base) = equilibrium_state(model, &traj.samples[0].pose, &cfg.limits)?;
    simulate_from(model, cfg, traj, state, &base)
}

/// Runs the closed loop from an explicit initial state and unstretched-length
/// baseline.
pub fn simulate_from(
    model: &RobotModel,
    cfg: &SimulationConfig,
    traj: &PlatformTrajectory,
    state: PlantState,
    unstretched_base: &[f64],
) -> Result<SimulationTrace> {
    if cfg.dt <= 0.0 || cfg.dt.is_nan() || cfg.dt > CONTROLLER_PERIOD + 1e-12 {
        return Err(Error::InvalidTimeStep);
    }
    if cfg.duration + 1e-12 < traj.duration() {
        return Err(Error::InvalidDuration);
    }
    if !cfg.lock_winches && (model.winch_inertia <= 0.0 || !model.winch_inertia.is_finite()) {
        return Err(Error::InvalidModel(alloc::string::String::from(
            "winch inertia must be positive unless winches are locked",
        )));
    }

    let n = model.cable_count();
    let m = model.dof;
    let setpoints = control::joint_setpoints(model, traj)?;
    let (torque_ff, ff_feasible) = feedforward_torques(model, traj, &cfg.limits)?;

    // constant mass matrix: factor once
    let mass = model::mass_matrix(model);
    let mass_chol = mass.cholesky().ok_or(Error::SingularMass)?;

    let steps = (cfg.duration / cfg.dt).round() as usize;
    let ctrl_every = (CONTROLLER_PERIOD / cfg.dt).round().max(1.0) as usize;

    let mut x = pose_to_coords(&state.pose, m);
    let mut t_vec = state.twist.generalized(m);
    let mut q = state.winch_angles.clone();
    let mut q_dot = state.winch_rates.clone();
    let mut integral = state.integral_error.clone();

    let mut torque = DVector::zeros(n);
    let mut torque_parts = TorqueParts {
        ff: DVector::zeros(n),
        friction: DVector::zeros(n),
        correction: DVector::zeros(n),
    };
    let mut setpoint_idx = 0usize;

    let mut records = Vec::with_capacity(steps + 1);
    let mut all_slack = false;

    for step in 0..=steps {
        let time = step as f64 * cfg.dt;

        if step % ctrl_every == 0 {
            setpoint_idx = setpoints.index_at(time);
            let sp = setpoints.sample(setpoint_idx);
            let e = sp.q - &q;
            integral += e * CONTROLLER_PERIOD;
            let plant_state = PlantState {
                pose: coords_to_pose(&x, m),
                twist: Twist::from_generalized(&t_vec),
                winch_angles: q.clone(),
                winch_rates: q_dot.clone(),
                integral_error: integral.clone(),
            };
            torque_parts.correction =
                control::correction_torque(model, &plant_state, &sp, &cfg.gains);
            torque_parts.friction = control::friction_torque(sp.q_dot, &cfg.friction);
            torque_parts.ff = torque_ff[setpoint_idx].clone();
            torque = &torque_parts.correction + &torque_parts.friction + &torque_parts.ff;
        }

        let k1 = rhs(
            model, cfg, &mass_chol, unstretched_base, &x, &t_vec, &q, &q_dot, &torque,
        )?;

        // record the state at this step, reusing the k1 tension evaluation
        let (desired_pose, desired_twist, _) = traj.state_at(time);
        let actual_pose = coords_to_pose(&x, m);
        let actual_twist = Twist::from_generalized(&t_vec);
        let dz = if m >= 3 {
            desired_twist.linear.z - actual_twist.linear.z
        } else {
            0.0
        };
        if k1.tensions.iter().all(|&t| t <= 0.0) {
            all_slack = true;
        }
        records.push(TraceRecord {
            time,
            desired_pose,
            desired_twist,
            actual_pose,
            actual_twist,
            q_desired: setpoints.q[setpoint_idx].iter().copied().collect(),
            q: q.iter().copied().collect(),
            q_rates: q_dot.iter().copied().collect(),
            tensions: k1.tensions.iter().copied().collect(),
            torque_ff: torque_parts.ff.iter().copied().collect(),
            torque_friction: torque_parts.friction.iter().copied().collect(),
            torque_correction: torque_parts.correction.iter().copied().collect(),
            torque: torque.iter().copied().collect(),
            velocity_error_z: dz,
        });
        if step == steps {
            break;
        }

        // classic RK4
        let h = cfg.dt;
        let k2 = rhs(
            model,
            cfg,
            &mass_chol,
            unstretched_base,
            &(&x + &k1.x_dot * (h / 2.0)),
            &(&t_vec + &k1.t_dot * (h / 2.0)),
            &(&q + &k1.q_dot * (h / 2.0)),
            &(&q_dot + &k1.q_ddot * (h / 2.0)),
            &torque,
        )?;
        let k3 = rhs(
            model,
            cfg,
            &mass_chol,
            unstretched_base,
            &(&x + &k2.x_dot * (h / 2.0)),
            &(&t_vec + &k2.t_dot * (h / 2.0)),
            &(&q + &k2.q_dot * (h / 2.0)),
            &(&q_dot + &k2.q_ddot * (h / 2.0)),
            &torque,
        )?;
        let k4 = rhs(
            model,
            cfg,
            &mass_chol,
            unstretched_base,
            &(&x + &k3.x_dot * h),
            &(&t_vec + &k3.t_dot * h),
            &(&q + &k3.q_dot * h),
            &(&q_dot + &k3.q_ddot * h),
            &torque,
        )?;
        x += (&k1.x_dot + &k2.x_dot * 2.0 + &k3.x_dot * 2.0 + &k4.x_dot) * (h / 6.0);
        t_vec += (&k1.t_dot + &k2.t_dot * 2.0 + &k3.t_dot * 2.0 + &k4.t_dot) * (h / 6.0);
        q += (&k1.q_dot + &k2.q_dot * 2.0 + &k3.q_dot * 2.0 + &k4.q_dot) * (h / 6.0);
        q_dot += (&k1.q_ddot + &k2.q_ddot * 2.0 + &k3.q_ddot * 2.0 + &k4.q_ddot) * (h / 6.0);

        let worst = x
            .amax()
            .max(t_vec.amax())
            .max(q.amax())
            .max(q_dot.amax());
        if !worst.is_finite() || worst > DIVERGENCE_LIMIT {
            return Err(Error::NumericalDivergence {
                time: time + cfg.dt,
            });
        }
    }

    Ok(SimulationTrace {
        dt: cfg.dt,
        records,
        all_cables_slack: all_slack,
        feedforward_feasible: ff_feasible,
    })
}

struct TorqueParts {
    ff: DVector<f64>,
    friction: DVector<f64>,
    correction: DVector<f64>,
}

/// Feed-forward torque series `Gamma_d = chi tau_d` along the trajectory.
fn feedforward_torques(
    model: &RobotModel,
    traj: &PlatformTrajectory,
    limits: &TensionLimits,
) -> Result<(Vec<DVector<f64>>, bool)> {
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut feasible = true;
    for s in &traj.samples {
        let w_ex = model::gravity_wrench(model, &s.pose);
        let w_f = tension::feedforward_wrench(model, &s.twist, &s.accel, &w_ex);
        let sp = tension::solve_tensions(model, &s.pose, &w_f, limits)?;
        feasible &= sp.feasible;
        let gamma = DVector::from_fn(model.cable_count(), |i, _| {
            model.winding_ratios[i] * sp.tensions[i]
        });
        out.push(gamma);
    }
    Ok((out, feasible))
}

struct Derivatives {
    x_dot: DVector<f64>,
    t_dot: DVector<f64>,
    q_dot: DVector<f64>,
    q_ddot: DVector<f64>,
    tensions: DVector<f64>,
}

#[allow(clippy::too_many_arguments)]
fn rhs(
    model: &RobotModel,
    cfg: &SimulationConfig,
    mass_chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    base: &[f64],
    x: &DVector<f64>,
    t_vec: &DVector<f64>,
    q: &DVector<f64>,
    q_dot: &DVector<f64>,
    torque: &DVector<f64>,
) -> Result<Derivatives> {
    let m = model.dof;
    let n = model.cable_count();
    let pose = coords_to_pose(x, m);
    let twist = Twist::from_generalized(t_vec);

    let geom = model::cable_geometry(model, &pose)?;
    let a = model::jacobian(model, &pose)?;
    let rates = -(&a * t_vec); // l_dot

    let ea = model.cable_ea();
    let damping = model.cable_damping;
    let mut tensions = DVector::zeros(n);
    for i in 0..n {
        let l_un = base[i] - model.winding_ratios[i] * q[i];
        let elongation = geom[i].length - l_un;
        let elongation_rate = rates[i] + model.winding_ratios[i] * q_dot[i];
        let raw = ea / l_un * elongation + damping * elongation_rate;
        tensions[i] = if cfg.bilateral_cables { raw } else { raw.max(0.0) };
    }

    let w_ex = model::gravity_wrench(model, &pose);
    let coriolis = model::coriolis_wrench(model, &twist);
    let force = a.transpose() * &tensions + w_ex - coriolis;
    let t_dot = mass_chol.solve(&force);

    let x_dot = if m == 6 {
        let odot = model::euler_rates(&pose.orientation, &twist.angular);
        DVector::from_row_slice(&[
            twist.linear.x,
            twist.linear.y,
            twist.linear.z,
            odot.x,
            odot.y,
            odot.z,
        ])
    } else {
        t_vec.clone()
    };

    let (q_dot_out, q_ddot) = if cfg.lock_winches {
        (DVector::zeros(n), DVector::zeros(n))
    } else {
        let friction = control::friction_torque(q_dot, &cfg.friction);
        let load = DVector::from_fn(n, |i, _| model.winding_ratios[i] * tensions[i]);
        let q_ddot = (torque - friction - load) / model.winch_inertia;
        (q_dot.clone(), q_ddot)
    };

    Ok(Derivatives {
        x_dot,
        t_dot,
        q_dot: q_dot_out,
        q_ddot,
        tensions,
    })
}

fn pose_to_coords(pose: &Pose, m: usize) -> DVector<f64> {
    let full = [
        pose.position.x,
        pose.position.y,
        pose.position.z,
        pose.orientation.x,
        pose.orientation.y,
        pose.orientation.z,
    ];
    DVector::from_row_slice(&full[..m])
}

fn coords_to_pose(x: &DVector<f64>, m: usize) -> Pose {
    let mut full = [0.0; 6];
    for i in 0..m {
        full[i] = x[i];
    }
    Pose {
        position: nalgebra::Vector3::new(full[0], full[1], full[2]),
        orientation: nalgebra::Vector3::new(full[3], full[4], full[5]),
    }
}

// ---------------------------------------------------------------------------
// metrics

/// First-period peak-to-peak analysis of the vertical velocity error after a
/// settling instant `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationMetrics {
    /// Peak-to-peak amplitude over the first oscillation period after the
    /// first mean crossing following `t_f` (whole-tail span when no
    /// oscillation was detected). \[m/s\]
    pub peak_to_peak: f64,
    /// False when the error never crosses its tail mean three times; the
    /// peak-to-peak then covers the whole tail.
    pub oscillation_detected: bool,
    /// Time window the peak-to-peak was measured over.
    pub window: (f64, f64),
    /// Mean of the velocity error over the tail.
    pub tail_mean: f64,
    /// First time after which the error stays within 2 % of the measured
    /// peak-to-peak around the tail mean; `None` if it never settles.
    pub settling_time: Option<f64>,
    /// Feed-forward (cable) torque set-points at the start of the motion.
    /// \[N m\]
    pub torque_start: Vec<f64>,
    /// Feed-forward (cable) torque set-points at `t_f`. \[N m\]
    pub torque_end: Vec<f64>,
}

/// Computes vibration metrics from a trace. `t_f` marks the end of the
/// commanded motion; the oscillation window starts at the first crossing of
/// the tail mean after it.
pub fn metrics(trace: &SimulationTrace, t_f: f64) -> Result<VibrationMetrics> {
    let tail: Vec<&TraceRecord> = trace.records.iter().filter(|r| r.time > t_f).collect();
    if tail.len() < 2 {
        return Err(Error::InvalidDuration);
    }
    let mean = tail.iter().map(|r| r.velocity_error_z).sum::<f64>() / tail.len() as f64;

    let mut crossings = Vec::new();
    for i in 0..tail.len() - 1 {
        let a = tail[i].velocity_error_z - mean;
        let b = tail[i + 1].velocity_error_z - mean;
        if a * b < 0.0 {
            crossings.push(i);
        }
    }

    let (p2p, detected, window) = if crossings.len() >= 3 {
        let (i0, i2) = (crossings[0], crossings[2] + 1);
        let slice = &tail[i0..=i2];
        let max = slice
            .iter()
            .map(|r| r.velocity_error_z)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = slice
            .iter()
            .map(|r| r.velocity_error_z)
            .fold(f64::INFINITY, f64::min);
        (max - min, true, (tail[i0].time, tail[i2].time))
    } else {
        let max = tail
            .iter()
            .map(|r| r.velocity_error_z)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = tail
            .iter()
            .map(|r| r.velocity_error_z)
            .fold(f64::INFINITY, f64::min);
        (
            max - min,
            false,
            (tail[0].time, tail[tail.len() - 1].time),
        )
    };

    let threshold = (0.02 * p2p).max(1e-15);
    let mut settling_time = None;
    for i in (0..tail.len()).rev() {
        if (tail[i].velocity_error_z - mean).abs() > threshold {
            settling_time = if i + 1 < tail.len() {
                Some(tail[i + 1].time)
            } else {
                None
            };
            break;
        }
        if i == 0 {
            settling_time = Some(tail[0].time);
        }
    }

    Ok(VibrationMetrics {
        peak_to_peak: p2p,
        oscillation_detected: detected,
        window,
        tail_mean: mean,
        settling_time,
        torque_start: feedforward_torque_at(trace, 0.0),
        torque_end: feedforward_torque_at(trace, t_f),
    })
}

/// Feed-forward (cable) torque set-point recorded nearest to `t`. This is
/// the component realized from the desired tensions, the quantity whose
/// start/end values the input shapers visibly lower.
pub fn feedforward_torque_at(trace: &SimulationTrace, t: f64) -> Vec<f64> {
    let idx = ((t / trace.dt).round().max(0.0) as usize).min(trace.records.len() - 1);
    trace.records[idx].torque_ff.clone()
}

/// Per-cable torque reduction of a shaped run against a reference run, in
/// percent, at the start and end of the transient.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueReduction {
    pub start_pct: Vec<f64>,
    pub end_pct: Vec<f64>,
}

pub fn torque_reduction(
    reference: &VibrationMetrics,
    shaped: &VibrationMetrics,
) -> TorqueReduction {
    let pct = |r: &[f64], s: &[f64]| {
        r.iter()
            .zip(s)
            .map(|(&a, &b)| if a != 0.0 { (a - b) / a * 100.0 } else { 0.0 })
            .collect()
    };
    TorqueReduction {
        start_pct: pct(&reference.torque_start, &shaped.torque_start),
        end_pct: pct(&reference.torque_end, &shaped.torque_end),
    }
}

/// First-period peak-to-peak velocity-error amplitudes \[m/s\] and the best
/// torque reduction \[%\] measured on the CREATOR prototype hardware. Desk
/// simulations print these beside their own results for context; they are
/// not reproduction targets (the physical rig has unmodeled damping and
/// disturbances).
pub mod reference {
    pub const PEAK_TO_PEAK_UNSHAPED: f64 = 0.0097;
    pub const PEAK_TO_PEAK_ZV: f64 = 0.0061;
    pub const PEAK_TO_PEAK_ZVD: f64 = 0.0045;
    pub const PEAK_TO_PEAK_ZVZV: f64 = 0.0056;
    pub const PEAK_TO_PEAK_ZVDZVD: f64 = 0.0028;
    pub const MAX_TORQUE_REDUCTION_PCT: f64 = 25.71;
}
