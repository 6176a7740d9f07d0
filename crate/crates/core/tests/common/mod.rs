//! Shared fixture: the CREATOR suspended 3-cable prototype.

use nalgebra::{Matrix3, Vector3};

use cdpr_core::RobotModel;

#[allow(dead_code)]
pub const P1: Vector3<f64> = Vector3::new(0.29, -0.047, 0.62);
#[allow(dead_code)]
pub const P2: Vector3<f64> = Vector3::new(0.29, -0.047, 1.62);

/// Effective axial stiffness [N] identified so f1(P1) = 3.67 Hz.
#[allow(dead_code)]
pub const EA_EFF: f64 = 2986.794572309399;

pub fn creator() -> RobotModel {
    RobotModel {
        exit_points: vec![
            Vector3::new(-2.085, 0.651, 2.726),
            Vector3::new(2.085, 0.651, 2.735),
            Vector3::new(-1.079, -1.898, 2.733),
        ],
        anchor_points: vec![Vector3::zeros(); 3],
        platform_mass: 0.65,
        platform_inertia: Matrix3::zeros(),
        com_offset: Vector3::zeros(),
        cable_modulus: 70e9,
        cable_area: 1.5707963267948966e-6,
        effective_ea: Some(EA_EFF),
        cable_damping: 0.0,
        winding_ratios: vec![0.06; 3],
        winch_inertia: 0.0031,
        dof: 3,
        gravity: Vector3::new(0.0, 0.0, -9.81),
    }
}
