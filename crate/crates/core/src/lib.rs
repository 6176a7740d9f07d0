//! Modeling and vibration-aware control of cable-driven parallel robots (CDPRs).
//!
//! A CDPR suspends a rigid platform from `n` winch-driven elastic cables. This
//! crate covers the chain from geometry to closed-loop behavior:
//!
//! - [`model`] — cable geometry, kinematic Jacobian, rigid-body terms,
//!   stiffness, and modal analysis (natural frequencies).
//! - [`tension`] — feed-forward wrench evaluation and positive cable tension
//!   distribution (unique solve or bounded minimum-norm).
//! - [`trajectory`] — sampled platform trajectories and the straight-line
//!   bang-bang test profile.
//! - [`shaping`] — ZV / ZVD impulse shapers, convolution into multi-mode
//!   shapers, trajectory shaping, residual vibration and insensitivity.
//! - [`workspace`] — first-natural-frequency fields on Cartesian grids,
//!   shaper sensitivity bands, and path validation.
//! - [`control`] — winch setpoints and the feed-forward + PID torque law.
//! - [`sim`] — a virtual elastic-cable plant with a fixed-step RK4
//!   integrator, simulation traces, and vibration metrics.
//!
//! The crate is `no_std` (with `alloc`); all file formats, parallel grid
//! evaluation, and the command-line front end live in the companion `cdpr`
//! binary crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod control;
pub mod error;
#[cfg(test)]
pub(crate) mod testutil;
pub mod model;
pub mod shaping;
pub mod sim;
pub mod tension;
pub mod trajectory;
pub mod workspace;

pub use error::{Error, Result};
pub use model::{CableGeometry, Pose, RobotModel, Twist};
pub use shaping::{ImpulseSequence, ModeSpec, ShaperKind};
pub use tension::{TensionLimits, TensionSetpoint};
pub use trajectory::PlatformTrajectory;
pub use workspace::{GridSpec, ScalarField, ShaperBand};
