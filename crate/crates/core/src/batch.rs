//! Data-parallel sweeps: many poses, many requests, many step sizes.
//!
//! Every function takes an [`Execution`] and returns results in input order,
//! so sequential and parallel runs are interchangeable.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dynamics;
use crate::geometry::{self, GeometryParams, JointDisplacements, PlatformPose};
use crate::mass_model::{self, MassParams};
use crate::newton::{NewtonOptions, NewtonReport};
use crate::par::{self, Execution};
use crate::planner::{self, PlanRequest, Trajectory};
use crate::{Result, Vec3};

/// Uniform random poses whose smallest radicand is at least
/// `margin · L²`, drawn by rejection from the cube `[−L, L]³`.
pub fn sample_poses(count: usize, seed: u64, g: &GeometryParams, margin: f64) -> Vec<PlatformPose> {
    let mut rng = StdRng::seed_from_u64(seed);
    let l = g.leg_length();
    let floor = margin * l * l;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = PlatformPose::new(
            rng.random_range(-l..l),
            rng.random_range(-l..l),
            rng.random_range(-l..l),
        );
        if geometry::is_feasible(&p, g).worst().1 >= floor {
            out.push(p);
        }
    }
    out
}

/// Random offsets with every component in `[−size, size]`.
pub fn sample_offsets(count: usize, seed: u64, size: f64) -> Vec<Vec3> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Vec3::new(
                rng.random_range(-size..=size),
                rng.random_range(-size..=size),
                rng.random_range(-size..=size),
            )
        })
        .collect()
}

pub fn inverse_kinematics(
    poses: &[PlatformPose],
    g: &GeometryParams,
    exec: Execution,
) -> Vec<Result<JointDisplacements>> {
    par::map(exec, poses, |p| geometry::inverse_kinematics(p, g))
}

/// `|FK(IK(p)) − p|_∞` per pose, with `p + offset` as the FK guess.
pub fn round_trip_errors(
    poses: &[PlatformPose],
    offsets: &[Vec3],
    g: &GeometryParams,
    exec: Execution,
) -> Vec<Result<f64>> {
    let pairs: Vec<(PlatformPose, Vec3)> =
        poses.iter().copied().zip(offsets.iter().copied()).collect();
    par::map(exec, &pairs, |(p, offset)| {
        let rho = geometry::inverse_kinematics(p, g)?;
        let back = geometry::forward_kinematics(&rho, g, &PlatformPose(p.0 + offset))?;
        Ok((back.0 - p.0).amax())
    })
}

/// Largest pairwise disagreement between the three COM routes, per pose.
pub fn com_route_spread(
    poses: &[PlatformPose],
    g: &GeometryParams,
    mp: &MassParams,
    exec: Execution,
) -> Vec<Result<f64>> {
    par::map(exec, poses, |p| {
        let rho = geometry::inverse_kinematics(p, g)?;
        let points = mass_model::com_from_points(&mass_model::lumped_points(p, &rho, g, mp)?)?;
        let closed = mass_model::com_closed_form(p, &rho, g, mp);
        let reduced = mass_model::com_of_pose(p, g, mp)?;
        Ok((points.0 - closed.0)
            .amax()
            .max((closed.0 - reduced.0).amax())
            .max((points.0 - reduced.0).amax()))
    })
}

/// Outcome of inverting one pose's COM from a perturbed guess.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOutcome {
    pub report: NewtonReport,
    /// `|solution − true pose|_∞`.
    pub error: f64,
}

/// For each pose, solves `com_of_pose(x) = com_of_pose(p)` from `p + offset`.
pub fn self_inversion(
    poses: &[PlatformPose],
    offsets: &[Vec3],
    g: &GeometryParams,
    mp: &MassParams,
    exec: Execution,
) -> Vec<Result<InversionOutcome>> {
    let pairs: Vec<(PlatformPose, Vec3)> =
        poses.iter().copied().zip(offsets.iter().copied()).collect();
    let opts = NewtonOptions::default();
    par::map(exec, &pairs, |(p, offset)| {
        let target = mass_model::com_of_pose(p, g, mp)?;
        let guess = PlatformPose(p.0 + offset);
        let report = planner::solve_com_waypoint_with(&target, &guess, g, mp, &opts)?;
        Ok(InversionOutcome {
            report,
            error: (report.solution - p.0).amax(),
        })
    })
}

/// Plans independent requests.
pub fn plan_many(requests: &[PlanRequest], exec: Execution) -> Vec<Result<Trajectory>> {
    par::map(exec, requests, planner::plan)
}

/// Peak shaking force of `base` re-planned at each step size.
pub fn peak_force_sweep(base: &PlanRequest, steps: &[f64], exec: Execution) -> Vec<Result<f64>> {
    par::map(exec, steps, |&dt| {
        let traj = planner::plan(&PlanRequest { dt, ..*base })?;
        let forces = dynamics::shaking_force_series(&traj, &base.masses)?;
        Ok(forces.iter().map(|f| f.force.norm()).fold(0.0, f64::max))
    })
}
