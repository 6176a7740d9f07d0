//! Shared fixtures for unit tests: the CREATOR suspended 3-cable prototype
//! with its identified effective cable stiffness.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Pose, RobotModel};

pub const CREATOR_P1: Vector3<f64> = Vector3::new(0.29, -0.047, 0.62);
pub const CREATOR_P2: Vector3<f64> = Vector3::new(0.29, -0.047, 1.62);

/// Effective axial stiffness EA \[N\] identified so the first natural
/// frequency at the start pose is 3.67 Hz (see configs/creator.json).
pub const CREATOR_EA: f64 = 2986.794572309399;

pub fn creator() -> RobotModel {
    RobotModel {
        exit_points: alloc::vec![
            Vector3::new(-2.085, 0.651, 2.726),
            Vector3::new(2.085, 0.651, 2.735),
            Vector3::new(-1.079, -1.898, 2.733),
        ],
        anchor_points: alloc::vec![Vector3::zeros(); 3],
        platform_mass: 0.65,
        platform_inertia: Matrix3::zeros(),
        com_offset: Vector3::zeros(),
        cable_modulus: 70e9,
        cable_area: 1.5707963267948966e-6,
        effective_ea: Some(CREATOR_EA),
        cable_damping: 0.0,
        winding_ratios: alloc::vec![0.06; 3],
        winch_inertia: 0.0031,
        dof: 3,
        gravity: Vector3::new(0.0, 0.0, -9.81),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random pose inside the CREATOR workspace, well away from exit points.
pub fn random_workspace_pose(rng: &mut ChaCha8Rng) -> Pose {
    Pose::at(Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.2..0.4),
        rng.gen_range(0.3..2.0),
    ))
}
