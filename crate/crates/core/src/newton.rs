//! Damped Newton iteration for square 3×3 nonlinear systems.
//!
//! Shared by forward kinematics (sphere constraints) and the COM-to-platform
//! inversion. A full Newton step is tried first; if the residual does not
//! strictly decrease, or the iterate leaves the system's domain, the step is
//! halved up to `max_halvings` times before giving up.

use nalgebra::Matrix3;

use crate::{Error, Result, Vec3};

/// A square system `F(x) = 0` in three unknowns.
///
/// `residual` returns `Err` when `x` is outside the domain of `F` (for the
/// Orthoglide, a pose with a negative radicand). Residuals are expressed in
/// meters so a single tolerance applies to every system.
pub trait System3 {
    fn residual(&self, x: &Vec3) -> Result<Vec3>;
    fn jacobian(&self, x: &Vec3) -> Result<Matrix3<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the max-norm of the residual, meters.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            max_halvings: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonReport {
    pub solution: Vec3,
    /// Number of accepted Newton steps.
    pub iterations: usize,
    /// Max-norm of the final residual, meters.
    pub residual: f64,
}

pub fn solve<S: System3 + ?Sized>(
    system: &S,
    guess: Vec3,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    let mut x = guess;
    let mut r = system.residual(&x)?;
    let mut norm = r.amax();

    for iteration in 0..opts.max_iterations {
        if norm <= opts.tolerance {
            return Ok(NewtonReport {
                solution: x,
                iterations: iteration,
                residual: norm,
            });
        }

        let jac = system.jacobian(&x)?;
        let step = jac
            .lu()
            .solve(&(-r))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian { residual: norm })?;

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let candidate = x + step * scale;
            if let Ok(rc) = system.residual(&candidate) {
                if rc.amax() < norm {
                    accepted = Some((candidate, rc));
                    break;
                }
            }
            scale *= 0.5;
        }

        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
                norm = r.amax();
            }
            None => return Err(Error::Stalled { residual: norm }),
        }
    }

    if norm <= opts.tolerance {
        Ok(NewtonReport {
            solution: x,
            iterations: opts.max_iterations,
            residual: norm,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: opts.max_iterations,
            residual: norm,
        })
    }
}
