//! Shaking force and lumped-mass shaking moment along a trajectory.
//!
//! The shaking force is `F = M·S̈`, with `S̈` obtained from second-order finite
//! differences of the sampled COM positions. The shaking moment about the
//! fixed origin is `Σ m_k (r_k × r̈_k)` over the seven lumped points of the
//! mass model; link rotational inertia is not modeled.

use serde::Serialize;

use crate::geometry::GeometryParams;
use crate::mass_model::{com_closed_form, lumped_points, MassParams};
use crate::planner::Trajectory;
use crate::{Error, Result, Vec3};

/// Fewest samples a series may have.
pub const MIN_SAMPLES: usize = 5;

/// Relative deviation of a time step from the first one that still counts as
/// uniform.
const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsSample {
    pub t: f64,
    pub com_accel: [f64; 3],
    pub force: [f64; 3],
    pub moment: [f64; 3],
}

impl DynamicsSample {
    pub fn force_norm(&self) -> f64 {
        Vec3::from(self.force).norm()
    }

    pub fn moment_norm(&self) -> f64 {
        Vec3::from(self.moment).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub t: f64,
    pub com_accel: Vec3,
    pub force: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSample {
    pub t: f64,
    pub moment: Vec3,
}

/// Common step of a uniform time grid.
pub fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            samples: times.len(),
            required: MIN_SAMPLES,
        });
    }
    let step = times[1] - times[0];
    if step.is_nan() || step <= 0.0 {
        return Err(Error::NonUniformGrid { index: 1 });
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > GRID_TOLERANCE * step {
            return Err(Error::NonUniformGrid { index: i + 1 });
        }
    }
    Ok(step)
}

/// Second derivative of a uniformly sampled vector series.
///
/// Central differences inside, one-sided second-order stencils
/// `(2x₀ − 5x₁ + 4x₂ − x₃)/h²` at both ends. Needs at least four samples.
pub fn second_derivative(series: &[Vec3], step: f64) -> Vec<Vec3> {
    let n = series.len();
    assert!(n >= 4, "second_derivative needs at least 4 samples");
    let h2 = step * step;
    // Written on first differences so a constant series gives exact zeros.
    let d: Vec<Vec3> = series.windows(2).map(|w| w[1] - w[0]).collect();
    (0..n)
        .map(|k| match k {
            0 => (3.0 * d[1] - 2.0 * d[0] - d[2]) / h2,
            _ if k == n - 1 => (2.0 * d[n - 2] - 3.0 * d[n - 3] + d[n - 4]) / h2,
            _ => (d[k] - d[k - 1]) / h2,
        })
        .collect()
}

fn time_step(traj: &Trajectory) -> Result<f64> {
    let times: Vec<f64> = traj.times().collect();
    uniform_step(&times)
}

/// COM acceleration per sample, with COM recomputed from (p, ρ) under `mp`.
pub fn com_acceleration(traj: &Trajectory, mp: &MassParams) -> Result<Vec<Vec3>> {
    let step = time_step(traj)?;
    let com: Vec<Vec3> = traj
        .samples
        .iter()
        .map(|s| com_closed_form(&s.pose, &s.joints, &traj.geometry, mp).0)
        .collect();
    Ok(second_derivative(&com, step))
}

pub fn shaking_force_series(traj: &Trajectory, mp: &MassParams) -> Result<Vec<ForceSample>> {
    let accel = com_acceleration(traj, mp)?;
    let total = mp.total();
    Ok(traj
        .samples
        .iter()
        .zip(accel)
        .map(|(s, a)| ForceSample {
            t: s.t,
            com_accel: a,
            force: a * total,
        })
        .collect())
}

/// Positions and accelerations of the seven lumped points, per sample.
pub fn lumped_point_motion(
    traj: &Trajectory,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<Vec<[(Vec3, Vec3, f64); 7]>> {
    let step = time_step(traj)?;
    let sets = traj
        .samples
        .iter()
        .map(|s| lumped_points(&s.pose, &s.joints, g, mp).map_err(|e| e.at_time(s.t)))
        .collect::<Result<Vec<_>>>()?;

    let mut out: Vec<[(Vec3, Vec3, f64); 7]> = sets
        .iter()
        .map(|set| set.points.map(|pm| (pm.position, Vec3::zeros(), pm.mass)))
        .collect();
    for k in 0..7 {
        let positions: Vec<Vec3> = sets.iter().map(|set| set.points[k].position).collect();
        for (row, a) in out.iter_mut().zip(second_derivative(&positions, step)) {
            row[k].1 = a;
        }
    }
    Ok(out)
}

pub fn shaking_moment_series(
    traj: &Trajectory,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<Vec<MomentSample>> {
    let motion = lumped_point_motion(traj, g, mp)?;
    Ok(traj
        .samples
        .iter()
        .zip(motion)
        .map(|(s, pts)| MomentSample {
            t: s.t,
            moment: pts.iter().map(|(r, a, m)| r.cross(a) * *m).sum(),
        })
        .collect())
}

/// Force and moment series together.
pub fn shaking_series(
    traj: &Trajectory,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<Vec<DynamicsSample>> {
    let forces = shaking_force_series(traj, mp)?;
    let moments = shaking_moment_series(traj, g, mp)?;
    Ok(forces
        .into_iter()
        .zip(moments)
        .map(|(f, m)| DynamicsSample {
            t: f.t,
            com_accel: f.com_accel.into(),
            force: f.force.into(),
            moment: m.moment.into(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShakingSummary {
    pub peak_force: f64,
    pub peak_force_time: f64,
    pub rms_force: f64,
    pub peak_moment: f64,
    pub peak_moment_time: f64,
    pub rms_moment: f64,
}

fn peak_and_rms(
    samples: &[DynamicsSample],
    norm: impl Fn(&DynamicsSample) -> f64,
) -> (f64, f64, f64) {
    let mut peak = 0.0;
    let mut peak_time = samples.first().map_or(0.0, |s| s.t);
    let mut sum_sq = 0.0;
    for s in samples {
        let v = norm(s);
        sum_sq += v * v;
        if v > peak {
            peak = v;
            peak_time = s.t;
        }
    }
    let rms = if samples.is_empty() {
        0.0
    } else {
        (sum_sq / samples.len() as f64).sqrt()
    };
    (peak, peak_time, rms)
}

pub fn summarize(samples: &[DynamicsSample]) -> ShakingSummary {
    let (peak_force, peak_force_time, rms_force) =
        peak_and_rms(samples, DynamicsSample::force_norm);
    let (peak_moment, peak_moment_time, rms_moment) =
        peak_and_rms(samples, DynamicsSample::moment_norm);
    ShakingSummary {
        peak_force,
        peak_force_time,
        rms_force,
        peak_moment,
        peak_moment_time,
        rms_moment,
    }
}

/// `(1 − balanced/unbalanced)·100`, or 0 when there is nothing to reduce.
pub fn reduction_percent(unbalanced: f64, balanced: f64) -> f64 {
    if unbalanced > 0.0 {
        (1.0 - balanced / unbalanced) * 100.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub unbalanced: ShakingSummary,
    pub balanced: ShakingSummary,
    pub force_reduction_percent: f64,
    pub moment_reduction_percent: f64,
}

const ENDPOINT_MATCH: f64 = 1e-12;

/// Summaries of both cases and the peak reductions from the first to the second.
pub fn compare(
    unbalanced: &Trajectory,
    balanced: &Trajectory,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<Comparison> {
    if unbalanced.duration != balanced.duration {
        return Err(Error::ScenarioMismatch(format!(
            "durations {} s and {} s",
            unbalanced.duration, balanced.duration
        )));
    }
    let ends = |t: &Trajectory| t.first().zip(t.last()).map(|(a, b)| (a.pose.0, b.pose.0));
    match (ends(unbalanced), ends(balanced)) {
        (Some((ua, ub)), Some((ba, bb))) => {
            if (ua - ba).amax() > ENDPOINT_MATCH || (ub - bb).amax() > ENDPOINT_MATCH {
                return Err(Error::ScenarioMismatch("endpoint poses differ".into()));
            }
        }
        _ => return Err(Error::ScenarioMismatch("empty trajectory".into())),
    }

    let u = summarize(&shaking_series(unbalanced, g, mp)?);
    let b = summarize(&shaking_series(balanced, g, mp)?);
    Ok(Comparison {
        unbalanced: u,
        balanced: b,
        force_reduction_percent: reduction_percent(u.peak_force, b.peak_force),
        moment_reduction_percent: reduction_percent(u.peak_moment, b.peak_moment),
    })
}
