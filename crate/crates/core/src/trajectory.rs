//! Sampled platform trajectories and the straight-line bang-bang profile.

use alloc::vec::Vec;
use nalgebra::Vector3;
#[cfg_attr(test, allow(unused_imports))] // inherent methods cover tests
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{Pose, Twist};

/// One record of a uniformly sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub pose: Pose,
    pub twist: Twist,
    /// Twist rate (linear and angular acceleration).
    pub accel: Twist,
}

/// Uniformly sampled pose/twist/acceleration series. Timestamps are
/// `k * dt`, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformTrajectory {
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
}

impl PlatformTrajectory {
    pub fn duration(&self) -> f64 {
        self.dt * (self.samples.len().saturating_sub(1)) as f64
    }

    /// Linear interpolation at an arbitrary time, clamped to the sampled
    /// range (the trajectory holds its end state).
    pub fn state_at(&self, t: f64) -> (Pose, Twist, Twist) {
        let last = self.samples.len() - 1;
        if t <= 0.0 {
            let s = &self.samples[0];
            return (s.pose, s.twist, s.accel);
        }
        let k = (t / self.dt) as usize;
        if k >= last {
            let s = &self.samples[last];
            return (s.pose, s.twist, s.accel);
        }
        let alpha = (t - k as f64 * self.dt) / self.dt;
        let a = &self.samples[k];
        let b = &self.samples[k + 1];
        let lerp3 = |x: &Vector3<f64>, y: &Vector3<f64>| x + (y - x) * alpha;
        (
            Pose {
                position: lerp3(&a.pose.position, &b.pose.position),
                orientation: lerp3(&a.pose.orientation, &b.pose.orientation),
            },
            Twist {
                linear: lerp3(&a.twist.linear, &b.twist.linear),
                angular: lerp3(&a.twist.angular, &b.twist.angular),
            },
            Twist {
                linear: lerp3(&a.accel.linear, &b.accel.linear),
                angular: lerp3(&a.accel.angular, &b.accel.angular),
            },
        )
    }
}

/// Closed-form bang-bang state at time `t` for a straight-line move from
/// `p1` to `p2` over `tf`: two parabolic arcs with a triangular velocity
/// profile peaking at `2 |p2 - p1| / tf`, pinned at `p2` after `tf`.
pub fn bang_bang_state(
    p1: &Vector3<f64>,
    p2: &Vector3<f64>,
    tf: f64,
    t: f64,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let delta = p2 - p1;
    // accelerating arc coefficient: +2 delta / tf^2 so that position reaches
    // the midpoint at tf/2; the braking arc mirrors it
    let beta1 = delta * (2.0 / (tf * tf));
    if t <= 0.0 {
        (*p1, Vector3::zeros(), beta1 * 2.0)
    } else if t < tf / 2.0 {
        (p1 + beta1 * t * t, beta1 * 2.0 * t, beta1 * 2.0)
    } else if t <= tf {
        let s = t - tf;
        (p2 - beta1 * s * s, -beta1 * 2.0 * s, -beta1 * 2.0)
    } else {
        (*p2, Vector3::zeros(), Vector3::zeros())
    }
}

/// Samples the bang-bang line move on a `dt` grid. The final sample lands at
/// the first grid point at or past `tf`, so both endpoints are exact.
pub fn bang_bang_line(
    p1: &Vector3<f64>,
    p2: &Vector3<f64>,
    tf: f64,
    dt: f64,
) -> Result<PlatformTrajectory> {
    if tf <= 0.0 || !tf.is_finite() {
        return Err(Error::InvalidDuration);
    }
    if dt <= 0.0 || dt.is_nan() || dt > tf / 100.0 {
        return Err(Error::InvalidTimeStep);
    }
    let steps = (tf / dt - 1e-9).ceil() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let (p, v, a) = bang_bang_state(p1, p2, tf, t);
        samples.push(TrajectorySample {
            time: t,
            pose: Pose::at(p),
            twist: Twist {
                linear: v,
                angular: Vector3::zeros(),
            },
            accel: Twist {
                linear: a,
                angular: Vector3::zeros(),
            },
        });
    }
    Ok(PlatformTrajectory { dt, samples })
}

/// Resamples by linear interpolation onto a new step. The step is snapped so
/// the total duration is preserved exactly: `dt = duration / round(duration /
/// dt_new)`.
pub fn resample(traj: &PlatformTrajectory, dt_new: f64) -> Result<PlatformTrajectory> {
    if dt_new <= 0.0 || dt_new.is_nan() {
        return Err(Error::InvalidTimeStep);
    }
    let duration = traj.duration();
    let steps = ((duration / dt_new).round() as usize).max(1);
    let dt = duration / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = if k == steps { duration } else { k as f64 * dt };
        let (pose, twist, accel) = traj.state_at(t);
        samples.push(TrajectorySample {
            time: t,
            pose,
            twist,
            accel,
        });
    }
    Ok(PlatformTrajectory { dt, samples })
}
