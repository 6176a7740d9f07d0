//! Winch setpoint generation and the feed-forward + PID torque law.
//!
//! Winch angles are measured positive in the wind-in direction, zero at the
//! trajectory start: `q_d = chi^-1 (l(pose_0) - l(pose))`. Rates follow as
//! `q_dot_d = chi^-1 A t`, which is the exact time derivative of `q_d`
//! because cable length rates are `l_dot = -A t`.
//!
//! The motor torque set-point is
//!
//! `Gamma = I_m (q_ddot_d + Kp e + Kd e_dot + Ki int(e)) + Gamma_f(q_dot_d)
//!  + Gamma_d`
//!
//! with `e = q_d - q`. The feed-forward term `Gamma_d = chi tau_d` realizes
//! the desired cable tensions through the winding ratio.

use alloc::vec::Vec;
use nalgebra::DVector;
#[cfg_attr(test, allow(unused_imports))] // inherent methods cover tests
use num_traits::Float;

use crate::error::Result;
use crate::model::{self, Pose, RobotModel, Twist};
use crate::trajectory::PlatformTrajectory;

/// Velocity width of the optional smooth (tanh) dry-friction model. \[rad/s\]
pub const FRICTION_SMOOTHING_WIDTH: f64 = 0.01;

/// PID gains of the correction torque, applied inside the normalized law
/// `h = q_ddot_d + Kp e + Kd e_dot + Ki int(e)` (units 1/s^2, 1/s, 1/s^3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub kp: f64,
    pub kd: f64,
    pub ki: f64,
}

/// Static + viscous joint friction parameters, one entry per winch.
#[derive(Debug, Clone, PartialEq)]
pub struct FrictionParams {
    /// Dry friction torques. \[N m\]
    pub dry: Vec<f64>,
    /// Viscous friction coefficients. \[N m s/rad\]
    pub viscous: Vec<f64>,
    /// Replace `sgn` by `tanh(q_dot / 0.01)`; keeps the plant right-hand
    /// side smooth for step-size studies.
    pub smooth: bool,
}

impl FrictionParams {
    pub fn uniform(n: usize, dry: f64, viscous: f64) -> Self {
        FrictionParams {
            dry: alloc::vec![dry; n],
            viscous: alloc::vec![viscous; n],
            smooth: false,
        }
    }

    pub fn frictionless(n: usize) -> Self {
        Self::uniform(n, 0.0, 0.0)
    }
}

/// Joint friction torque `Gamma_f = Gamma_s sgn(q_dot) + Gamma_v q_dot`,
/// with `sgn(0) = 0`.
pub fn friction_torque(q_dot: &DVector<f64>, fr: &FrictionParams) -> DVector<f64> {
    DVector::from_fn(q_dot.len(), |i, _| {
        let v = q_dot[i];
        let dry = if fr.smooth {
            fr.dry[i] * (v / FRICTION_SMOOTHING_WIDTH).tanh()
        } else if v > 0.0 {
            fr.dry[i]
        } else if v < 0.0 {
            -fr.dry[i]
        } else {
            0.0
        };
        dry + fr.viscous[i] * v
    })
}

/// Winch setpoint series sampled on the trajectory grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSetpoints {
    pub dt: f64,
    pub q: Vec<DVector<f64>>,
    pub q_dot: Vec<DVector<f64>>,
    pub q_ddot: Vec<DVector<f64>>,
}

impl JointSetpoints {
    /// Sample index for a time, clamped to the series (end state held).
    pub fn index_at(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        ((t / self.dt).round() as usize).min(self.q.len() - 1)
    }
}

/// Maps a platform trajectory to winch angle/rate/acceleration setpoints.
/// Angles are zeroed at the first sample; accelerations come from centered
/// differences of the rates.
pub fn joint_setpoints(model: &RobotModel, traj: &PlatformTrajectory) -> Result<JointSetpoints> {
    let n = model.cable_count();
    let count = traj.samples.len();
    let mut q = Vec::with_capacity(count);
    let mut q_dot = Vec::with_capacity(count);
    let l0: Vec<f64> = model::cable_geometry(model, &traj.samples[0].pose)?
        .iter()
        .map(|g| g.length)
        .collect();
    for s in &traj.samples {
        let geom = model::cable_geometry(model, &s.pose)?;
        let rates = model::cable_rates(model, &s.pose, &s.twist)?;
        let mut qk = DVector::zeros(n);
        let mut qdk = DVector::zeros(n);
        for i in 0..n {
            let chi = model.winding_ratios[i];
            qk[i] = (l0[i] - geom[i].length) / chi;
            qdk[i] = -rates[i] / chi;
        }
        q.push(qk);
        q_dot.push(qdk);
    }
    let mut q_ddot = Vec::with_capacity(count);
    for k in 0..count {
        let qdd = if count == 1 {
            DVector::zeros(n)
        } else if k == 0 {
            (&q_dot[1] - &q_dot[0]) / traj.dt
        } else if k == count - 1 {
            (&q_dot[k] - &q_dot[k - 1]) / traj.dt
        } else {
            (&q_dot[k + 1] - &q_dot[k - 1]) / (2.0 * traj.dt)
        };
        q_ddot.push(qdd);
    }
    Ok(JointSetpoints { dt: traj.dt, q, q_dot, q_ddot })
}

/// Plant state advanced by the simulator: platform pose and twist, winch
/// angles and rates, and the controller's integral accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub pose: Pose,
    pub twist: Twist,
    pub winch_angles: DVector<f64>,
    pub winch_rates: DVector<f64>,
    /// Accumulated tracking error `int (q_d - q) dt`. \[rad s\]
    pub integral_error: DVector<f64>,
}

/// One setpoint tuple, borrowed from a [`JointSetpoints`] series.
#[derive(Debug, Clone, Copy)]
pub struct SetpointSample<'a> {
    pub q: &'a DVector<f64>,
    pub q_dot: &'a DVector<f64>,
    pub q_ddot: &'a DVector<f64>,
}

impl JointSetpoints {
    pub fn sample(&self, k: usize) -> SetpointSample<'_> {
        SetpointSample {
            q: &self.q[k],
            q_dot: &self.q_dot[k],
            q_ddot: &self.q_ddot[k],
        }
    }
}

/// Correction torque `Gamma_corr = I_m (q_ddot_d + Kp e + Kd e_dot +
/// Ki int(e))`.
pub fn correction_torque(
    model: &RobotModel,
    state: &PlantState,
    sp: &SetpointSample<'_>,
    gains: &ControllerGains,
) -> DVector<f64> {
    let e = sp.q - &state.winch_angles;
    let e_dot = sp.q_dot - &state.winch_rates;
    let h = sp.q_ddot + e * gains.kp + e_dot * gains.kd + &state.integral_error * gains.ki;
    h * model.winch_inertia
}

/// Full torque set-point `Gamma = Gamma_corr + Gamma_f(q_dot_d) + Gamma_d`.
pub fn control_torque(
    model: &RobotModel,
    state: &PlantState,
    sp: &SetpointSample<'_>,
    gains: &ControllerGains,
    fr: &FrictionParams,
    torque_ff: &DVector<f64>,
) -> DVector<f64> {
    correction_torque(model, state, sp, gains) + friction_torque(sp.q_dot, fr) + torque_ff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{creator, CREATOR_P1, CREATOR_P2};
    use crate::trajectory::bang_bang_line;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    const GAINS: ControllerGains = ControllerGains {
        kp: 1125.8,
        kd: 58.12,
        ki: 7269.60,
    };

    #[test]
    fn static_trajectory_constant_setpoints() {
        let model = creator();
        let traj = bang_bang_line(&CREATOR_P1, &CREATOR_P1, 2.0, 1e-2).unwrap();
        let sp = joint_setpoints(&model, &traj).unwrap();
        for k in 0..sp.q.len() {
            assert_relative_eq!(sp.q[k].amax(), 0.0);
            assert_relative_eq!(sp.q_dot[k].amax(), 0.0);
            assert_relative_eq!(sp.q_ddot[k].amax(), 0.0);
        }
    }

    #[test]
    fn winding_ratio_scales_setpoints_inversely() {
        let model = creator();
        let mut doubled = model.clone();
        for chi in &mut doubled.winding_ratios {
            *chi *= 2.0;
        }
        let traj = bang_bang_line(&CREATOR_P1, &CREATOR_P2, 3.0, 1e-3).unwrap();
        let a = joint_setpoints(&model, &traj).unwrap();
        let b = joint_setpoints(&doubled, &traj).unwrap();
        for k in (0..a.q.len()).step_by(250) {
            for i in 0..3 {
                assert_relative_eq!(b.q[k][i], a.q[k][i] / 2.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rates_match_angle_differences() {
        let model = creator();
        let traj = bang_bang_line(&CREATOR_P1, &CREATOR_P2, 3.0, 1e-3).unwrap();
        let sp = joint_setpoints(&model, &traj).unwrap();
        for k in (1..sp.q.len() - 1).step_by(37) {
            let fd = (&sp.q[k + 1] - &sp.q[k - 1]) / (2.0 * traj.dt);
            let err = (&fd - &sp.q_dot[k]).amax();
            assert!(err < 20.0 * traj.dt * traj.dt, "k={k} err={err}");
        }
    }

    #[test]
    fn friction_basics() {
        let fr = FrictionParams::uniform(3, 0.14, 0.0);
        let zero = friction_torque(&DVector::zeros(3), &fr);
        assert_eq!(zero, DVector::zeros(3));
        let fwd = friction_torque(&DVector::from_element(3, 5.0), &fr);
        for i in 0..3 {
            assert_relative_eq!(fwd[i], 0.14);
        }
        let q_dot = DVector::from_row_slice(&[0.3, -1.2, 4.0]);
        let back = friction_torque(&(-q_dot.clone()), &fr);
        let fwd2 = friction_torque(&q_dot, &fr);
        assert_relative_eq!(back, -fwd2, epsilon = 1e-15);
    }

    #[test]
    fn smooth_friction_is_odd_and_bounded() {
        let mut fr = FrictionParams::uniform(1, 0.14, 0.05);
        fr.smooth = true;
        let f = |v: f64| friction_torque(&DVector::from_element(1, v), &fr)[0];
        assert_eq!(f(0.0), 0.0);
        assert_relative_eq!(f(0.5), -f(-0.5), epsilon = 1e-15);
        assert!(f(1.0) < 0.14 + 0.05 + 1e-9);
    }

    #[test]
    fn perfect_tracking_reduces_to_feedforward() {
        let model = creator();
        let n = 3;
        let q = DVector::zeros(n);
        let state = PlantState {
            pose: Pose::at(CREATOR_P1),
            twist: Twist::zero(),
            winch_angles: q.clone(),
            winch_rates: DVector::zeros(n),
            integral_error: DVector::zeros(n),
        };
        let (qd, qdd) = (DVector::zeros(n), DVector::zeros(n));
        let sp = SetpointSample {
            q: &q,
            q_dot: &qd,
            q_ddot: &qdd,
        };
        let fr = FrictionParams::uniform(n, 0.14, 0.0);
        let gamma_d = DVector::from_row_slice(&[0.13, 0.26, 0.15]);
        let gamma = control_torque(&model, &state, &sp, &GAINS, &fr, &gamma_d);
        assert_relative_eq!(gamma, gamma_d, epsilon = 1e-15);
    }

    #[test]
    fn proportional_term_is_linear() {
        let model = creator();
        let n = 3;
        let gains = ControllerGains {
            kp: GAINS.kp,
            kd: 0.0,
            ki: 0.0,
        };
        let q_offset = DVector::from_element(n, -0.02); // e = q_d - q = +0.02
        let state = PlantState {
            pose: Pose::at(CREATOR_P1),
            twist: Twist::zero(),
            winch_angles: q_offset,
            winch_rates: DVector::zeros(n),
            integral_error: DVector::zeros(n),
        };
        let (qd0, qdot0, qdd0) = (DVector::zeros(n), DVector::zeros(n), DVector::zeros(n));
        let sp = SetpointSample {
            q: &qd0,
            q_dot: &qdot0,
            q_ddot: &qdd0,
        };
        let fr = FrictionParams::frictionless(n);
        let gamma = control_torque(&model, &state, &sp, &gains, &fr, &DVector::zeros(n));
        for i in 0..n {
            assert_relative_eq!(
                gamma[i],
                model.winch_inertia * gains.kp * 0.02,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn tracking_error_dynamics_decay() {
        // closed loop on the bare double integrator I_m q_ddot = Gamma_corr:
        // e_ddot + Kd e_dot + Kp e + Ki int(e) = 0
        let mut e = 0.01;
        let mut e_dot = 0.0;
        let mut ie = 0.0;
        let dt = 1e-4;
        let deriv = |e: f64, e_dot: f64, ie: f64| {
            (e_dot, -(GAINS.kd * e_dot + GAINS.kp * e + GAINS.ki * ie), e)
        };
        for _ in 0..20_000 {
            let (k1e, k1v, k1i) = deriv(e, e_dot, ie);
            let (k2e, k2v, k2i) = deriv(e + 0.5 * dt * k1e, e_dot + 0.5 * dt * k1v, ie + 0.5 * dt * k1i);
            let (k3e, k3v, k3i) = deriv(e + 0.5 * dt * k2e, e_dot + 0.5 * dt * k2v, ie + 0.5 * dt * k2i);
            let (k4e, k4v, k4i) = deriv(e + dt * k3e, e_dot + dt * k3v, ie + dt * k3i);
            e += dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
            e_dot += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            ie += dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
        }
        // the triple pole near -19.4 rad/s wipes out the error within 2 s
        assert!(e.abs() < 1e-8, "e(2 s) = {e}");
        assert!(e_dot.abs() < 1e-7);
    }

    #[test]
    fn setpoint_rates_consistent_with_cable_rates() {
        let model = creator();
        let traj = bang_bang_line(&CREATOR_P1, &CREATOR_P2, 3.0, 1e-3).unwrap();
        let sp = joint_setpoints(&model, &traj).unwrap();
        // q_dot_d = chi^-1 A t at each sample
        for k in (0..traj.samples.len()).step_by(500) {
            let a = crate::model::jacobian(&model, &traj.samples[k].pose).unwrap();
            let expected = a * traj.samples[k].twist.generalized(3) / 0.06;
            assert_relative_eq!(sp.q_dot[k], expected, epsilon = 1e-12);
        }
        let _ = Vector3::<f64>::zeros();
    }
}
