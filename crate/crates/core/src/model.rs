//! CDPR geometry, kinematics, rigid-body dynamics terms, stiffness, and
//! modal analysis.
//!
//! Conventions used throughout the crate:
//!
//! - Exit points `b_i` are fixed cable attachments on the base frame; anchor
//!   points `a_i` are attachments on the platform, expressed in the platform
//!   frame. The cable vector is `l_i = b_i - R(o) a_i - p` and the unit
//!   direction `u_i = l_i / |l_i|` points from the platform anchor toward the
//!   exit point, i.e. along the pull of a taut cable.
//! - The kinematic matrix `A` has rows `[u_i^T, ((R a_i) x u_i)^T]` truncated
//!   to the first `m` twist components. Its transpose maps tensions to the
//!   cable wrench on the platform (`w_cable = A^T tau`), and cable length
//!   rates satisfy `l_dot = -A t` for a platform twist `t`. The wrench matrix
//!   of the tension module is `W = -A^T`.
//! - Orientations use Z-Y-X Euler angles `o = (phi, theta, psi)`:
//!   `R = Rz(phi) Ry(theta) Rx(psi)`. A 3-DOF model treats the platform as a
//!   point mass and ignores orientation entirely.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
#[cfg_attr(test, allow(unused_imports))] // inherent methods cover tests
use num_traits::Float;

use crate::error::{Error, Result};

/// Cable lengths below this are treated as degenerate (platform coincides
/// with an exit point). \[m\]
pub const DEGENERATE_CABLE_TOL: f64 = 1e-9;

/// Condition-number threshold beyond which the mass matrix is treated as
/// singular.
pub const SINGULAR_MASS_COND: f64 = 1e12;

/// Geometry, inertia, and actuation parameters of one robot. The single
/// source of truth for all model math.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    /// Cable exit points `b_i` in the base frame. \[m\]
    pub exit_points: Vec<Vector3<f64>>,
    /// Cable anchor points `a_i` in the platform frame; all zero for a
    /// point-mass platform. \[m\]
    pub anchor_points: Vec<Vector3<f64>>,
    /// Total platform mass. \[kg\]
    pub platform_mass: f64,
    /// Platform inertia about its mass center. \[kg m^2\]
    pub platform_inertia: Matrix3<f64>,
    /// Offset from the platform geometric center to its mass center. \[m\]
    pub com_offset: Vector3<f64>,
    /// Cable elastic modulus. \[Pa\]
    pub cable_modulus: f64,
    /// Cable cross-section area. \[m^2\]
    pub cable_area: f64,
    /// When set, overrides `cable_modulus * cable_area` as the axial
    /// stiffness coefficient EA. Used to run with an identified effective
    /// stiffness instead of the catalog value. \[N\]
    pub effective_ea: Option<f64>,
    /// Viscous damping coefficient applied to cable elongation rate in the
    /// virtual plant; zero for the ideal elastic cable. \[N s/m\]
    pub cable_damping: f64,
    /// Winch winding ratios `chi_i`: meters of cable per radian of winch
    /// rotation. \[m/rad\]
    pub winding_ratios: Vec<f64>,
    /// Moment of inertia of each winch/motor assembly. \[kg m^2\]
    pub winch_inertia: f64,
    /// Platform degrees of freedom `m`: 1..3 for translational rigs, 6 for a
    /// full spatial platform.
    pub dof: usize,
    /// Gravity acceleration vector. \[m/s^2\]
    pub gravity: Vector3<f64>,
}

impl RobotModel {
    pub fn cable_count(&self) -> usize {
        self.exit_points.len()
    }

    /// Axial stiffness coefficient EA \[N\]; `k_i = EA / l_i`.
    pub fn cable_ea(&self) -> f64 {
        self.effective_ea
            .unwrap_or(self.cable_modulus * self.cable_area)
    }

    /// Checks the structural invariants. Call once after construction;
    /// the operation functions assume a valid model.
    pub fn validate(&self) -> Result<()> {
        let n = self.cable_count();
        let m = self.dof;
        if !(1..=3).contains(&m) && m != 6 {
            return Err(Error::InvalidModel(String::from(
                "dof must be 1, 2, 3, or 6",
            )));
        }
        if n < m {
            return Err(Error::InvalidModel(String::from(
                "cable count must be >= dof",
            )));
        }
        if self.anchor_points.len() != n {
            return Err(Error::InvalidModel(String::from(
                "anchor_points length must match exit_points",
            )));
        }
        if self.winding_ratios.len() != n {
            return Err(Error::InvalidModel(String::from(
                "winding_ratios length must match exit_points",
            )));
        }
        if self.platform_mass <= 0.0 || !self.platform_mass.is_finite() {
            return Err(Error::InvalidModel(String::from("platform mass must be positive")));
        }
        if self.cable_ea() <= 0.0 || !self.cable_ea().is_finite() {
            return Err(Error::InvalidModel(String::from("cable EA must be positive")));
        }
        if self.cable_damping < 0.0 {
            return Err(Error::InvalidModel(String::from("cable damping must be >= 0")));
        }
        if self.winding_ratios.iter().any(|&chi| chi <= 0.0 || !chi.is_finite()) {
            return Err(Error::InvalidModel(String::from("winding ratios must be positive")));
        }
        if self.winch_inertia < 0.0 {
            return Err(Error::InvalidModel(String::from("winch inertia must be >= 0")));
        }
        // Inertia must be symmetric positive semidefinite.
        if (self.platform_inertia - self.platform_inertia.transpose()).norm() > 1e-9 {
            return Err(Error::InvalidModel(String::from("inertia must be symmetric")));
        }
        let eig = self.platform_inertia.symmetric_eigenvalues();
        if eig.iter().any(|&l| l < -1e-12) {
            return Err(Error::InvalidModel(String::from(
                "inertia must be positive semidefinite",
            )));
        }
        if m <= 3 {
            if self.anchor_points.iter().any(|a| a.norm() != 0.0) {
                return Err(Error::InvalidModel(String::from(
                    "point-mass model requires zero anchor points",
                )));
            }
            if self.com_offset.norm() != 0.0 {
                return Err(Error::InvalidModel(String::from(
                    "point-mass model requires zero com offset",
                )));
            }
        }
        Ok(())
    }
}

/// Platform pose: position plus Z-Y-X Euler orientation (ignored for
/// translational models).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Vector3<f64>,
}

impl Pose {
    /// Pose at a position with zero orientation.
    pub fn at(position: Vector3<f64>) -> Self {
        Pose {
            position,
            orientation: Vector3::zeros(),
        }
    }

    /// Rotation matrix `Rz(phi) Ry(theta) Rx(psi)`.
    pub fn rotation(&self) -> Matrix3<f64> {
        let (phi, theta, psi) = (self.orientation.x, self.orientation.y, self.orientation.z);
        let (cf, sf) = (phi.cos(), phi.sin());
        let (ct, st) = (theta.cos(), theta.sin());
        let (cp, sp) = (psi.cos(), psi.sin());
        Matrix3::new(
            cf * ct,
            cf * st * sp - sf * cp,
            cf * st * cp + sf * sp,
            sf * ct,
            sf * st * sp + cf * cp,
            sf * st * cp - cf * sp,
            -st,
            ct * sp,
            ct * cp,
        )
    }
}

/// Platform twist (or twist rate): linear and angular components in the base
/// frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl Twist {
    pub fn zero() -> Self {
        Twist {
            linear: Vector3::zeros(),
            angular: Vector3::zeros(),
        }
    }

    /// First `m` generalized components `[v; w]`.
    pub fn generalized(&self, m: usize) -> DVector<f64> {
        let full = [
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        ];
        DVector::from_row_slice(&full[..m])
    }

    /// Inverse of [`Twist::generalized`]; missing components are zero.
    pub fn from_generalized(v: &DVector<f64>) -> Self {
        let mut full = [0.0; 6];
        for (i, x) in v.iter().enumerate().take(6) {
            full[i] = *x;
        }
        Twist {
            linear: Vector3::new(full[0], full[1], full[2]),
            angular: Vector3::new(full[3], full[4], full[5]),
        }
    }
}

/// Per-cable geometry at a pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableGeometry {
    /// Cable vector from the platform anchor to the exit point. \[m\]
    pub vector: Vector3<f64>,
    /// Cable length. \[m\]
    pub length: f64,
    /// Unit vector along `vector`.
    pub direction: Vector3<f64>,
}

pub(crate) fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Solves the geometric closed loop `l_i = b_i - R a_i - p` for every cable.
pub fn cable_geometry(model: &RobotModel, pose: &Pose) -> Result<Vec<CableGeometry>> {
    let r = if model.dof > 3 {
        pose.rotation()
    } else {
        Matrix3::identity()
    };
    let mut out = Vec::with_capacity(model.cable_count());
    for (i, (b, a)) in model
        .exit_points
        .iter()
        .zip(model.anchor_points.iter())
        .enumerate()
    {
        let vector = b - r * a - pose.position;
        let length = vector.norm();
        if length < DEGENERATE_CABLE_TOL {
            return Err(Error::DegenerateCable { cable: i });
        }
        out.push(CableGeometry {
            vector,
            length,
            direction: vector / length,
        });
    }
    Ok(out)
}

/// Kinematic matrix `A` (n x m) with rows `[u_i^T, ((R a_i) x u_i)^T]`
/// truncated to `m` columns.
///
/// `A^T tau` is the cable wrench on the platform for tensions `tau`, and
/// cable length rates are `l_dot = -A t` (see [`cable_rates`]).
pub fn jacobian(model: &RobotModel, pose: &Pose) -> Result<DMatrix<f64>> {
    let geom = cable_geometry(model, pose)?;
    let n = model.cable_count();
    let m = model.dof;
    let r = if m > 3 {
        pose.rotation()
    } else {
        Matrix3::identity()
    };
    let mut a = DMatrix::zeros(n, m);
    for (i, g) in geom.iter().enumerate() {
        let u = g.direction;
        let moment = (r * model.anchor_points[i]).cross(&u);
        let row = [u.x, u.y, u.z, moment.x, moment.y, moment.z];
        for (j, val) in row.iter().take(m).enumerate() {
            a[(i, j)] = *val;
        }
    }
    Ok(a)
}

/// Cable length rates `l_dot = -A t` for a platform twist.
pub fn cable_rates(model: &RobotModel, pose: &Pose, twist: &Twist) -> Result<DVector<f64>> {
    let a = jacobian(model, pose)?;
    Ok(-(a * twist.generalized(model.dof)))
}

/// Generalized mass matrix of the platform (m x m, symmetric).
///
/// For translational models this is `m_ee I`; the 6-DOF form couples the
/// translational and rotational blocks through the mass-center offset.
pub fn mass_matrix(model: &RobotModel) -> DMatrix<f64> {
    let m = model.dof;
    let mass = model.platform_mass;
    if m <= 3 {
        return DMatrix::identity(m, m) * mass;
    }
    let d = skew(&model.com_offset);
    let mut out = DMatrix::zeros(6, 6);
    let top_left = Matrix3::identity() * mass;
    let top_right = -d * mass;
    let bottom_left = d * mass;
    let bottom_right = model.platform_inertia - d * d * mass;
    out.view_mut((0, 0), (3, 3)).copy_from(&top_left);
    out.view_mut((0, 3), (3, 3)).copy_from(&top_right);
    out.view_mut((3, 0), (3, 3)).copy_from(&bottom_left);
    out.view_mut((3, 3), (3, 3)).copy_from(&bottom_right);
    out
}

/// Coriolis and centrifugal wrench `C t`; zero whenever the angular velocity
/// vanishes (and identically zero for translational models).
pub fn coriolis_wrench(model: &RobotModel, twist: &Twist) -> DVector<f64> {
    let m = model.dof;
    if m <= 3 {
        return DVector::zeros(m);
    }
    let w = skew(&twist.angular);
    let d = skew(&model.com_offset);
    let mass = model.platform_mass;
    let top = w * w * model.com_offset * mass;
    let bottom = w * ((model.platform_inertia - d * d * mass) * twist.angular);
    let mut out = DVector::zeros(6);
    out.rows_mut(0, 3).copy_from(&top);
    out.rows_mut(3, 3).copy_from(&bottom);
    out
}

/// Overall stiffness `K_x = A^T K_l A` with `K_l = diag(EA / l_i)` evaluated
/// at the instantaneous cable lengths. Symmetric positive semidefinite.
pub fn stiffness_matrix(model: &RobotModel, pose: &Pose) -> Result<DMatrix<f64>> {
    let geom = cable_geometry(model, pose)?;
    let a = jacobian(model, pose)?;
    let ea = model.cable_ea();
    let m = model.dof;
    let mut k = DMatrix::zeros(m, m);
    // Sum of rank-one contributions k_i * a_i a_i^T keeps K_x exactly
    // symmetric.
    for (i, g) in geom.iter().enumerate() {
        let row = a.row(i).transpose();
        let ki = ea / g.length;
        k += row.clone() * row.transpose() * ki;
    }
    Ok(k)
}

/// Result of a modal analysis: frequencies in ascending order plus the mode
/// shape matrix (one column per mode, in generalized coordinates).
#[derive(Debug, Clone)]
pub struct ModalAnalysis {
    pub frequencies_hz: Vec<f64>,
    pub mode_shapes: DMatrix<f64>,
}

/// Undamped natural frequencies from the generalized eigenproblem of
/// `M^{-1} K_x`, as `f_i = sqrt(lambda_i) / (2 pi)`, ascending.
pub fn natural_frequencies(model: &RobotModel, pose: &Pose) -> Result<ModalAnalysis> {
    let m_mat = mass_matrix(model);
    let m = model.dof;
    let eig_m = m_mat.clone().symmetric_eigen().eigenvalues;
    let lmin = eig_m.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = eig_m.iter().cloned().fold(0.0, f64::max);
    if lmin <= 0.0 || !lmin.is_finite() || lmax / lmin > SINGULAR_MASS_COND {
        return Err(Error::SingularMass);
    }
    let k = stiffness_matrix(model, pose)?;
    let chol = m_mat.cholesky().ok_or(Error::SingularMass)?;
    let l = chol.l();
    // Reduce M v lambda = K v to the symmetric problem B w = lambda w with
    // B = L^-1 K L^-T and v = L^-T w.
    let linv_k = l
        .solve_lower_triangular(&k)
        .ok_or(Error::SingularMass)?;
    let b = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or(Error::SingularMass)?;
    let se = b.symmetric_eigen();
    let lt = l.transpose();
    let shapes = lt
        .solve_upper_triangular(&se.eigenvectors)
        .ok_or(Error::SingularMass)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut frequencies_hz = Vec::with_capacity(m);
    let mut mode_shapes = DMatrix::zeros(m, m);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = se.eigenvalues[idx].max(0.0);
        frequencies_hz.push(lambda.sqrt() / two_pi);
        mode_shapes.set_column(col, &shapes.column(idx));
    }
    Ok(ModalAnalysis {
        frequencies_hz,
        mode_shapes,
    })
}

/// Gravity wrench acting on the platform at a pose: force `m_ee g` applied at
/// the mass center, expressed at the platform center.
pub fn gravity_wrench(model: &RobotModel, pose: &Pose) -> DVector<f64> {
    let m = model.dof;
    let force = model.gravity * model.platform_mass;
    if m <= 3 {
        return DVector::from_row_slice(&[force.x, force.y, force.z][..m]);
    }
    let r = pose.rotation();
    let moment = (r * model.com_offset).cross(&force);
    DVector::from_row_slice(&[force.x, force.y, force.z, moment.x, moment.y, moment.z])
}

/// Maps base-frame angular velocity to Z-Y-X Euler angle rates.
///
/// Singular at `cos(theta) = 0` (gimbal lock); callers integrate away from
/// that configuration.
pub(crate) fn euler_rates(orientation: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    let (phi, theta) = (orientation.x, orientation.y);
    let (cf, sf) = (phi.cos(), phi.sin());
    let (ct, st) = (theta.cos(), theta.sin());
    // omega = E(o) * o_dot with columns [z, Rz y, Rz Ry x]
    let e = Matrix3::new(
        0.0, -sf, cf * ct, //
        0.0, cf, sf * ct, //
        1.0, 0.0, -st,
    );
    e.try_inverse().map(|inv| inv * omega).unwrap_or_else(Vector3::zeros)
}
