//! Discrete-time trajectory generation for the two planning modes.
//!
//! `PlatformLineQuintic` moves the platform point along a straight line with a
//! quintic law; the COM follows whatever curve the mass model dictates.
//! `ComLineBangBang` moves the COM along a straight line with a bang-bang law
//! and recovers the platform position at every waypoint by inverting
//! [`com_of_pose`] with Newton's method, warm-started from the previous
//! waypoint.

use std::fmt;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::geometry::{self, GeometryParams, JointDisplacements, PlatformPose};
use crate::mass_model::{com_jacobian, com_of_pose, ComPosition, MassParams};
use crate::newton::{self, NewtonOptions, NewtonReport, System3};
use crate::profiles::{LineSegment3, ProfileKind, ProfileSpec};
use crate::{Error, Result, Vec3};

/// Minimum number of time steps in a plan.
pub const MIN_STEPS: usize = 100;

/// How far a solved final pose may sit from the requested end pose before it
/// is treated as a different solution branch rather than roundoff.
pub const ENDPOINT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    PlatformLineQuintic,
    ComLineBangbang,
}

impl PlanMode {
    pub const ALL: [PlanMode; 2] = [PlanMode::PlatformLineQuintic, PlanMode::ComLineBangbang];

    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::PlatformLineQuintic => "platform_line_quintic",
            PlanMode::ComLineBangbang => "com_line_bangbang",
        }
    }

    pub fn profile(self) -> ProfileKind {
        match self {
            PlanMode::PlatformLineQuintic => ProfileKind::Quintic,
            PlanMode::ComLineBangbang => ProfileKind::BangBang,
        }
    }
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRequest {
    pub start: PlatformPose,
    pub end: PlatformPose,
    pub duration: f64,
    pub dt: f64,
    pub mode: PlanMode,
    pub geometry: GeometryParams,
    pub masses: MassParams,
}

impl PlanRequest {
    /// The prototype move from the home pose to (−0.1, 0.07, −0.11) m in 1 s
    /// with a 1 ms step.
    pub fn prototype(mode: PlanMode) -> Self {
        Self {
            start: PlatformPose::origin(),
            end: PlatformPose::new(-0.1, 0.07, -0.11),
            duration: 1.0,
            dt: 1e-3,
            mode,
            geometry: GeometryParams::prototype(),
            masses: MassParams::prototype(),
        }
    }

    pub fn with_mode(self, mode: PlanMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        time_grid(self.duration, self.dt)?;
        geometry::is_feasible(&self.start, &self.geometry).check()?;
        geometry::is_feasible(&self.end, &self.geometry).check()?;
        Ok(())
    }
}

/// Uniform grid over `[0, duration]` including both endpoints.
///
/// The step count is `ceil(duration / dt)`; when that does not divide evenly
/// the effective step shrinks to `duration / steps`, so the grid stays uniform
/// and never exceeds the requested `dt`.
pub fn time_grid(duration: f64, dt: f64) -> Result<Vec<f64>> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid(
            "t_f",
            format!("must be > 0, got {duration}"),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    let steps = (duration / dt - 1e-9).ceil().max(1.0) as usize;
    if steps < MIN_STEPS || dt > duration / MIN_STEPS as f64 * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "dt",
            format!("dt too large: need >= {MIN_STEPS} samples, got {steps}"),
        ));
    }
    Ok((0..=steps)
        .map(|k| duration * (k as f64 / steps as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: PlatformPose,
    pub joints: JointDisplacements,
    pub com: ComPosition,
    /// Commanded COM waypoint (COM-line mode only).
    pub commanded_com: Option<ComPosition>,
    /// Newton steps spent on this waypoint (zero in platform-line mode).
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: PlanMode,
    pub duration: f64,
    pub geometry: GeometryParams,
    pub masses: MassParams,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&TrajectorySample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn max_iterations(&self) -> usize {
        self.samples.iter().map(|s| s.iterations).max().unwrap_or(0)
    }
}

pub fn plan(req: &PlanRequest) -> Result<Trajectory> {
    match req.mode {
        PlanMode::PlatformLineQuintic => plan_platform_line(req),
        PlanMode::ComLineBangbang => plan_com_line(req),
    }
}

fn sample_at(
    t: f64,
    pose: PlatformPose,
    req: &PlanRequest,
    commanded_com: Option<ComPosition>,
    iterations: usize,
) -> Result<TrajectorySample> {
    let joints = geometry::inverse_kinematics(&pose, &req.geometry).map_err(|e| e.at_time(t))?;
    let com = com_of_pose(&pose, &req.geometry, &req.masses).map_err(|e| e.at_time(t))?;
    Ok(TrajectorySample {
        t,
        pose,
        joints,
        com,
        commanded_com,
        iterations,
    })
}

/// Platform point on a straight line under the quintic law.
pub fn plan_platform_line(req: &PlanRequest) -> Result<Trajectory> {
    req.validate()?;
    let grid = time_grid(req.duration, req.dt)?;
    let spec = ProfileSpec::new(ProfileKind::Quintic, req.duration)?;
    let seg = LineSegment3::between(req.start.0, req.end.0);
    let last = grid.len() - 1;

    let samples = grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let pose = if k == last {
                req.end
            } else {
                let sigma = spec.eval(t)?.position;
                PlatformPose(seg.start + seg.displacement * sigma)
            };
            sample_at(t, pose, req, None, 0)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Trajectory {
        mode: PlanMode::PlatformLineQuintic,
        duration: req.duration,
        geometry: req.geometry,
        masses: req.masses,
        samples,
    })
}

/// Residual `com_of_pose(p) − target`, meters of COM.
struct ComInversion<'a> {
    target: Vec3,
    geometry: &'a GeometryParams,
    masses: &'a MassParams,
}

impl System3 for ComInversion<'_> {
    fn residual(&self, p: &Vec3) -> Result<Vec3> {
        Ok(com_of_pose(&PlatformPose(*p), self.geometry, self.masses)?.0 - self.target)
    }

    fn jacobian(&self, p: &Vec3) -> Result<Matrix3<f64>> {
        com_jacobian(&PlatformPose(*p), self.geometry, self.masses)
    }
}

/// Platform pose whose COM equals `target`, found from `guess`.
pub fn solve_com_waypoint(
    target: &ComPosition,
    guess: &PlatformPose,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<PlatformPose> {
    solve_com_waypoint_with(target, guess, g, mp, &NewtonOptions::default())
        .map(|r| PlatformPose(r.solution))
}

pub fn solve_com_waypoint_with(
    target: &ComPosition,
    guess: &PlatformPose,
    g: &GeometryParams,
    mp: &MassParams,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    geometry::is_feasible(guess, g).check()?;
    let system = ComInversion {
        target: target.0,
        geometry: g,
        masses: mp,
    };
    newton::solve(&system, guess.0, opts)
}

/// COM on a straight line under the bang-bang law.
pub fn plan_com_line(req: &PlanRequest) -> Result<Trajectory> {
    req.validate()?;
    let grid = time_grid(req.duration, req.dt)?;
    let spec = ProfileSpec::new(ProfileKind::BangBang, req.duration)?;
    let com_start = com_of_pose(&req.start, &req.geometry, &req.masses)?;
    let com_end = com_of_pose(&req.end, &req.geometry, &req.masses)?;
    let seg = LineSegment3::between(com_start.0, com_end.0);
    let opts = NewtonOptions::default();
    let last = grid.len() - 1;

    let mut samples = Vec::with_capacity(grid.len());
    let mut guess = req.start;
    for (k, &t) in grid.iter().enumerate() {
        let commanded = match k {
            0 => com_start,
            _ if k == last => com_end,
            _ => ComPosition(seg.start + seg.displacement * spec.eval(t)?.position),
        };
        let report = solve_com_waypoint_with(&commanded, &guess, &req.geometry, &req.masses, &opts)
            .map_err(|e| e.at_time(t))?;
        let mut pose = PlatformPose(report.solution);
        if k == last {
            let miss = (pose.0 - req.end.0).amax();
            if miss > ENDPOINT_TOLERANCE {
                return Err(Error::NoConvergence {
                    iterations: report.iterations,
                    residual: miss,
                }
                .at_time(t));
            }
            pose = req.end;
        }
        samples.push(sample_at(t, pose, req, Some(commanded), report.iterations)?);
        guess = pose;
    }

    Ok(Trajectory {
        mode: PlanMode::ComLineBangbang,
        duration: req.duration,
        geometry: req.geometry,
        masses: req.masses,
        samples,
    })
}
