//! Input-shaping filters: impulse sequences, convolution, trajectory
//! shaping, residual vibration, and insensitivity.
//!
//! A shaper is a normalized train of positive impulses. Convolving a command
//! with it splits the command into delayed copies whose modal responses
//! cancel, at the cost of a delay equal to the last impulse time.

use alloc::vec::Vec;
use nalgebra::Vector3;
#[cfg_attr(test, allow(unused_imports))] // inherent methods cover tests
use num_traits::Float;

use crate::model::{Pose, Twist};
use crate::trajectory::{PlatformTrajectory, TrajectorySample};

/// Impulses closer than this are merged during convolution. \[s\]
pub const TIME_MERGE_TOL: f64 = 1e-9;

/// One impulse: dimensionless amplitude at a time offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub amplitude: f64,
    pub time: f64,
}

/// A vibration mode targeted by a shaper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub frequency_hz: f64,
    pub damping_ratio: f64,
}

impl ModeSpec {
    pub fn undamped(frequency_hz: f64) -> Self {
        ModeSpec {
            frequency_hz,
            damping_ratio: 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.frequency_hz > 0.0 && (0.0..1.0).contains(&self.damping_ratio)
    }

    /// Per-half-period amplitude decay `exp(-zeta pi / sqrt(1 - zeta^2))`.
    pub fn decay_ratio(&self) -> f64 {
        let z = self.damping_ratio;
        (-z * core::f64::consts::PI / (1.0 - z * z).sqrt()).exp()
    }
}

/// Ordered amplitude/time pairs with `sum(D) = 1`, `D_i > 0`, `t_1 = 0`, and
/// strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSequence {
    impulses: Vec<Impulse>,
}

impl ImpulseSequence {
    /// The identity shaper: a single unit impulse at t = 0.
    pub fn unit() -> Self {
        ImpulseSequence {
            impulses: alloc::vec![Impulse {
                amplitude: 1.0,
                time: 0.0,
            }],
        }
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    /// Delay introduced by the shaper: the last impulse time. \[s\]
    pub fn delay(&self) -> f64 {
        self.impulses.last().map_or(0.0, |i| i.time)
    }

    /// Convolution: all pairwise amplitude products at pairwise time sums,
    /// duplicates within [`TIME_MERGE_TOL`] merged by amplitude addition.
    /// Normalization is preserved.
    pub fn convolve(&self, other: &ImpulseSequence) -> ImpulseSequence {
        let mut pairs: Vec<Impulse> =
            Vec::with_capacity(self.impulses.len() * other.impulses.len());
        for a in &self.impulses {
            for b in &other.impulses {
                pairs.push(Impulse {
                    amplitude: a.amplitude * b.amplitude,
                    time: a.time + b.time,
                });
            }
        }
        Self::from_pairs(pairs)
    }

    fn from_pairs(mut pairs: Vec<Impulse>) -> ImpulseSequence {
        pairs.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
        let mut merged: Vec<Impulse> = Vec::with_capacity(pairs.len());
        for p in pairs {
            match merged.last_mut() {
                Some(last) if (p.time - last.time).abs() < TIME_MERGE_TOL => {
                    last.amplitude += p.amplitude;
                }
                _ => merged.push(p),
            }
        }
        ImpulseSequence { impulses: merged }
    }
}

/// Two-impulse zero-vibration shaper for one mode: amplitudes
/// `[1, eps] / (1 + eps)` at `t = [0, 1/(2f)]`.
///
/// The half-period spacing uses the undamped frequency for any damping
/// ratio; see docs/errata.md in the repository root.
pub fn zv(mode: &ModeSpec) -> ImpulseSequence {
    assert!(mode.is_valid(), "invalid mode spec");
    let eps = mode.decay_ratio();
    let half = 1.0 / (2.0 * mode.frequency_hz);
    ImpulseSequence {
        impulses: alloc::vec![
            Impulse {
                amplitude: 1.0 / (1.0 + eps),
                time: 0.0,
            },
            Impulse {
                amplitude: eps / (1.0 + eps),
                time: half,
            },
        ],
    }
}

/// Three-impulse zero-vibration-derivative shaper: amplitudes
/// `[1, 2 eps, eps^2] / (1 + eps)^2` at `t = [0, 1/(2f), 1/f]`.
pub fn zvd(mode: &ModeSpec) -> ImpulseSequence {
    assert!(mode.is_valid(), "invalid mode spec");
    let eps = mode.decay_ratio();
    let denom = (1.0 + eps) * (1.0 + eps);
    let half = 1.0 / (2.0 * mode.frequency_hz);
    ImpulseSequence {
        impulses: alloc::vec![
            Impulse {
                amplitude: 1.0 / denom,
                time: 0.0,
            },
            Impulse {
                amplitude: 2.0 * eps / denom,
                time: half,
            },
            Impulse {
                amplitude: eps * eps / denom,
                time: 2.0 * half,
            },
        ],
    }
}

/// Single-mode shaper families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShaperKind {
    Zv,
    Zvd,
}

impl ShaperKind {
    pub fn build(self, mode: &ModeSpec) -> ImpulseSequence {
        match self {
            ShaperKind::Zv => zv(mode),
            ShaperKind::Zvd => zvd(mode),
        }
    }
}

/// Convolves every trajectory channel with the impulse train:
/// `x_hat(t) = sum_i D_i x(t - t_i)`, so the output lasts `delay()` longer
/// than the input.
///
/// Outside the sampled range the pose channel holds its boundary value while
/// the twist and acceleration channels are zero — a held pose has zero rates,
/// so delayed impulse copies contribute no motion before they arrive or
/// after their copy of the motion ends.
///
/// Impulse times are rounded to the nearest sample (error at most dt/2).
pub fn shape_trajectory(
    shaper: &ImpulseSequence,
    traj: &PlatformTrajectory,
) -> PlatformTrajectory {
    let dt = traj.dt;
    let n_in = traj.samples.len() as isize;
    let offsets: Vec<(f64, isize)> = shaper
        .impulses
        .iter()
        .map(|i| (i.amplitude, (i.time / dt).round() as isize))
        .collect();
    let extra = offsets.iter().map(|&(_, o)| o).max().unwrap_or(0).max(0);
    let n_out = (n_in + extra) as usize;

    let mut samples = Vec::with_capacity(n_out);
    for k in 0..n_out {
        let mut pos = Vector3::zeros();
        let mut ori = Vector3::zeros();
        let mut lin = Vector3::zeros();
        let mut ang = Vector3::zeros();
        let mut acc_lin = Vector3::zeros();
        let mut acc_ang = Vector3::zeros();
        for &(amp, off) in &offsets {
            let raw = k as isize - off;
            let idx = raw.clamp(0, n_in - 1) as usize;
            let s = &traj.samples[idx];
            pos += s.pose.position * amp;
            ori += s.pose.orientation * amp;
            if raw == idx as isize {
                lin += s.twist.linear * amp;
                ang += s.twist.angular * amp;
                acc_lin += s.accel.linear * amp;
                acc_ang += s.accel.angular * amp;
            }
        }
        samples.push(TrajectorySample {
            time: k as f64 * dt,
            pose: Pose {
                position: pos,
                orientation: ori,
            },
            twist: Twist {
                linear: lin,
                angular: ang,
            },
            accel: Twist {
                linear: acc_lin,
                angular: acc_ang,
            },
        });
    }
    PlatformTrajectory { dt, samples }
}

/// Residual vibration amplitude ratio of a second-order mode driven through
/// the shaper, relative to the unshaped response:
///
/// `V = exp(-zeta w t_N) sqrt(C^2 + S^2)` with
/// `C = sum D_i exp(zeta w t_i) cos(w_d t_i)`,
/// `S = sum D_i exp(zeta w t_i) sin(w_d t_i)`,
/// `w = 2 pi f`, `w_d = w sqrt(1 - zeta^2)`, `t_N` the last impulse time.
pub fn residual_vibration(shaper: &ImpulseSequence, mode: &ModeSpec) -> f64 {
    let w = 2.0 * core::f64::consts::PI * mode.frequency_hz;
    let z = mode.damping_ratio;
    let wd = w * (1.0 - z * z).sqrt();
    let mut c = 0.0;
    let mut s = 0.0;
    for i in &shaper.impulses {
        let e = (z * w * i.time).exp();
        c += i.amplitude * e * (wd * i.time).cos();
        s += i.amplitude * e * (wd * i.time).sin();
    }
    (-z * w * shaper.delay()).exp() * (c * c + s * s).sqrt()
}

/// Width of the contiguous normalized-frequency band around `f / f_m = 1`
/// where the residual vibration of the tuned shaper stays at or below
/// `level`. Edges are located by bisection to 1e-6.
pub fn insensitivity(kind: ShaperKind, mode: &ModeSpec, level: f64) -> f64 {
    assert!((0.0..1.0).contains(&level), "level must be in (0, 1)");
    let shaper = kind.build(mode);
    let vib = |r: f64| {
        residual_vibration(
            &shaper,
            &ModeSpec {
                frequency_hz: r * mode.frequency_hz,
                damping_ratio: mode.damping_ratio,
            },
        )
    };
    let lo = band_edge(&vib, level, -1.0);
    let hi = band_edge(&vib, level, 1.0);
    hi - lo
}

/// Locates the band edge on one side of r = 1 by bracket expansion plus
/// bisection. `side` is -1 for the lower edge, +1 for the upper.
fn band_edge(vib: &dyn Fn(f64) -> f64, level: f64, side: f64) -> f64 {
    let step = 0.02;
    let mut inside = 1.0;
    let mut outside = 1.0 + side * step;
    let cap = if side < 0.0 { 1e-3 } else { 4.0 };
    while vib(outside) <= level {
        inside = outside;
        outside += side * step;
        if (side < 0.0 && outside <= cap) || (side > 0.0 && outside >= cap) {
            return cap;
        }
    }
    for _ in 0..64 {
        let mid = 0.5 * (inside + outside);
        if vib(mid) <= level {
            inside = mid;
        } else {
            outside = mid;
        }
        if (outside - inside).abs() < 1e-6 {
            break;
        }
    }
    0.5 * (inside + outside)
}
