//! Feed-forward wrench evaluation and cable tension distribution.
//!
//! Cables can only pull, so desired tensions must stay positive. For a
//! non-redundant robot (`n == m`) the dynamic equilibrium `W tau + w_f = 0`
//! with `W = -A^T` has a unique solution; for `n > m` the solver picks the
//! minimum-2-norm tension vector inside the configured bounds via an
//! active-set iteration over the null space.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{self, Pose, RobotModel, Twist};

/// Determinant magnitude below which a square wrench matrix is singular.
const SINGULAR_DET_TOL: f64 = 1e-12;

/// Bound-violation tolerance of the active-set solver. \[N\]
const BOUND_TOL: f64 = 1e-9;

/// Tension bounds applied to every cable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionLimits {
    /// Lowest admissible tension; keeps cables taut. \[N\]
    pub min: f64,
    /// Highest admissible tension. \[N\]
    pub max: f64,
}

impl Default for TensionLimits {
    fn default() -> Self {
        TensionLimits {
            min: 1.0,
            max: 500.0,
        }
    }
}

/// Solver output: desired tensions plus a feasibility flag. When `feasible`
/// is false no tension vector satisfies the limits and `tensions` carries the
/// unconstrained minimum-norm solution instead.
#[derive(Debug, Clone, PartialEq)]
pub struct TensionSetpoint {
    pub tensions: DVector<f64>,
    pub feasible: bool,
}

/// Feed-forward wrench `w_f = M a_d + C t_d - w_ex` for a desired twist and
/// twist rate. `w_ex` is the external wrench on the platform, the gravity
/// wrench in the common case (see [`model::gravity_wrench`]).
pub fn feedforward_wrench(
    model: &RobotModel,
    twist_d: &Twist,
    accel_d: &Twist,
    w_ex: &DVector<f64>,
) -> DVector<f64> {
    let m = model::mass_matrix(model);
    m * accel_d.generalized(model.dof) + model::coriolis_wrench(model, twist_d) - w_ex
}

/// Wrench matrix `W = -A^T` (m x n): maps cable tensions to the negated
/// cable wrench used by the equilibrium equation `W tau + w_f = 0`.
pub fn wrench_matrix(model: &RobotModel, pose: &Pose) -> Result<DMatrix<f64>> {
    Ok(-model::jacobian(model, pose)?.transpose())
}

/// Solves `W tau + w_f = 0` for desired cable tensions at a pose.
///
/// - `n == m`: unique linear solve, [`Error::SingularWrenchMatrix`] when
///   `|det W|` is below tolerance. The feasibility flag reports whether the
///   unique solution respects the limits.
/// - `n > m`: bounded minimum-2-norm distribution. Infeasibility is reported,
///   never clamped away, so the equilibrium residual stays exact whenever
///   `feasible` is true.
pub fn solve_tensions(
    model: &RobotModel,
    pose: &Pose,
    w_f: &DVector<f64>,
    limits: &TensionLimits,
) -> Result<TensionSetpoint> {
    let w = wrench_matrix(model, pose)?;
    let b = -w_f;
    let n = model.cable_count();
    let m = model.dof;

    if n == m {
        if w.determinant().abs() < SINGULAR_DET_TOL {
            return Err(Error::SingularWrenchMatrix);
        }
        let tau = w
            .lu()
            .solve(&b)
            .ok_or(Error::SingularWrenchMatrix)?;
        let feasible = in_bounds(&tau, limits);
        return Ok(TensionSetpoint {
            tensions: tau,
            feasible,
        });
    }

    match bounded_min_norm(&w, &b, limits) {
        Some(tau) => Ok(TensionSetpoint {
            tensions: tau,
            feasible: true,
        }),
        None => {
            let tau = min_norm(&w, &b).ok_or(Error::SingularWrenchMatrix)?;
            Ok(TensionSetpoint {
                tensions: tau,
                feasible: false,
            })
        }
    }
}

fn in_bounds(tau: &DVector<f64>, limits: &TensionLimits) -> bool {
    tau.iter()
        .all(|&t| t >= limits.min - BOUND_TOL && t <= limits.max + BOUND_TOL)
}

/// Unconstrained minimum-norm solution `tau = W^T (W W^T)^-1 b`.
fn min_norm(w: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = w * w.transpose();
    let lambda = gram.cholesky()?.solve(b);
    Some(w.transpose() * lambda)
}

/// Active-set minimum-norm solve of `W tau = b` with box bounds.
///
/// Iterates between clamping the worst bound violator and releasing clamped
/// variables whose KKT multiplier has the wrong sign. Returns `None` when no
/// feasible tension vector exists (or the free columns lose row rank, which
/// amounts to the same thing for this geometry).
fn bounded_min_norm(
    w: &DMatrix<f64>,
    b: &DVector<f64>,
    limits: &TensionLimits,
) -> Option<DVector<f64>> {
    let n = w.ncols();
    let m = w.nrows();
    let mut clamped: Vec<Option<f64>> = alloc::vec![None; n];

    for _ in 0..200 {
        let free: Vec<usize> = (0..n).filter(|&i| clamped[i].is_none()).collect();
        if free.len() < m {
            return None;
        }

        let mut b_eff = b.clone();
        for (i, c) in clamped.iter().enumerate() {
            if let Some(v) = c {
                b_eff -= w.column(i) * *v;
            }
        }
        let w_free = w.select_columns(free.iter());
        let gram = &w_free * w_free.transpose();
        let lambda = gram.cholesky()?.solve(&b_eff);
        let tau_free = w_free.transpose() * &lambda;

        // worst bound violation among free variables
        let mut worst: Option<(usize, f64, f64)> = None; // (free idx, violation, bound)
        for (k, &t) in tau_free.iter().enumerate() {
            let (viol, bound) = if t < limits.min {
                (limits.min - t, limits.min)
            } else if t > limits.max {
                (t - limits.max, limits.max)
            } else {
                continue;
            };
            if worst.is_none_or(|(_, v, _)| viol > v) {
                worst = Some((k, viol, bound));
            }
        }
        if let Some((k, viol, bound)) = worst {
            if viol > BOUND_TOL {
                clamped[free[k]] = Some(bound);
                continue;
            }
        }

        // all free variables in bounds; check multipliers of clamped ones
        let w_t_lambda = w.transpose() * &lambda;
        let mut release: Option<(usize, f64)> = None;
        for (i, c) in clamped.iter().enumerate() {
            let Some(v) = c else { continue };
            let slack = *v - w_t_lambda[i];
            // at the lower bound the multiplier tau_i - (W^T lambda)_i must
            // be >= 0; at the upper bound <= 0
            let viol = if *v == limits.min { -slack } else { slack };
            if viol > BOUND_TOL && release.is_none_or(|(_, rv)| viol > rv) {
                release = Some((i, viol));
            }
        }
        if let Some((i, _)) = release {
            clamped[i] = None;
            continue;
        }

        let mut tau = DVector::zeros(n);
        for (i, c) in clamped.iter().enumerate() {
            if let Some(v) = c {
                tau[i] = *v;
            }
        }
        for (k, &i) in free.iter().enumerate() {
            tau[i] = tau_free[k].clamp(limits.min, limits.max);
        }
        if (w * &tau - b).amax() > 1e-7 {
            return None;
        }
        return Some(tau);
    }
    None
}
