//! Rest-to-rest motion laws on a normalized path parameter σ ∈ [0, 1].
//!
//! The bang-bang law accelerates at `+4/t_f²` for the first half and
//! decelerates at `−4/t_f²` for the second; among rest-to-rest laws it has the
//! smallest peak acceleration. The quintic `10τ³ − 15τ⁴ + 6τ⁵` also starts
//! and ends with zero acceleration, at the price of a peak `10/(√3 t_f²)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Peak |σ''|·t_f² of the bang-bang law.
pub const BANG_BANG_PEAK_FACTOR: f64 = 4.0;

/// Peak |σ''|·t_f² of the quintic law, `10/√3`.
pub const QUINTIC_PEAK_FACTOR: f64 = 5.773_502_691_896_258;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    BangBang,
    Quintic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    duration: f64,
}

impl ProfileSpec {
    pub fn new(kind: ProfileKind, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid(
                "t_f",
                format!("must be > 0, got {duration}"),
            ));
        }
        Ok(Self { kind, duration })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn eval(&self, t: f64) -> Result<ProfileSample> {
        match self.kind {
            ProfileKind::BangBang => bang_bang_scalar(t, self.duration),
            ProfileKind::Quintic => quintic_scalar(t, self.duration),
        }
    }
}

/// σ and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub position: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

/// What the bang-bang law reports for σ'' at exactly `t_f/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchConvention {
    /// The accelerating branch, `+4/t_f²`.
    #[default]
    LeftLimit,
    /// Mean of both one-sided limits, `0`.
    Average,
}

fn normalized(t: f64, duration: f64) -> Result<f64> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid(
            "t_f",
            format!("must be > 0, got {duration}"),
        ));
    }
    if !(0.0..=duration).contains(&t) {
        return Err(Error::TimeOutOfRange { t, duration });
    }
    Ok(t / duration)
}

pub fn bang_bang_scalar(t: f64, duration: f64) -> Result<ProfileSample> {
    bang_bang_scalar_with(t, duration, SwitchConvention::LeftLimit)
}

pub fn bang_bang_scalar_with(
    t: f64,
    duration: f64,
    convention: SwitchConvention,
) -> Result<ProfileSample> {
    let tau = normalized(t, duration)?;
    let accel = BANG_BANG_PEAK_FACTOR / (duration * duration);
    let sample = if tau <= 0.5 {
        ProfileSample {
            position: 2.0 * tau * tau,
            velocity: 4.0 * tau / duration,
            acceleration: accel,
        }
    } else {
        ProfileSample {
            position: -1.0 + 4.0 * tau - 2.0 * tau * tau,
            velocity: 4.0 * (1.0 - tau) / duration,
            acceleration: -accel,
        }
    };
    if tau == 0.5 && convention == SwitchConvention::Average {
        return Ok(ProfileSample {
            acceleration: 0.0,
            ..sample
        });
    }
    Ok(sample)
}

pub fn quintic_scalar(t: f64, duration: f64) -> Result<ProfileSample> {
    let tau = normalized(t, duration)?;
    let (t2, t3) = (tau * tau, tau * tau * tau);
    Ok(ProfileSample {
        position: t3 * (10.0 - 15.0 * tau + 6.0 * t2),
        velocity: 30.0 * t2 * (1.0 - tau) * (1.0 - tau) / duration,
        acceleration: 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2) / (duration * duration),
    })
}

/// Closed-form peak |acceleration| for a path of length `distance`.
pub fn peak_acceleration(spec: &ProfileSpec, distance: f64) -> f64 {
    let factor = match spec.kind {
        ProfileKind::BangBang => BANG_BANG_PEAK_FACTOR,
        ProfileKind::Quintic => QUINTIC_PEAK_FACTOR,
    };
    factor * distance / (spec.duration * spec.duration)
}

/// Fractional peak-acceleration reduction of bang-bang relative to quintic.
pub fn bang_bang_peak_reduction() -> f64 {
    1.0 - BANG_BANG_PEAK_FACTOR / QUINTIC_PEAK_FACTOR
}

/// Straight segment `start → start + displacement`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment3 {
    pub start: Vec3,
    pub displacement: Vec3,
}

impl LineSegment3 {
    pub fn between(start: Vec3, end: Vec3) -> Self {
        Self {
            start,
            displacement: end - start,
        }
    }

    pub fn end(&self) -> Vec3 {
        self.start + self.displacement
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

pub fn line_trajectory(seg: &LineSegment3, spec: &ProfileSpec, t: f64) -> Result<LinePoint> {
    let s = spec.eval(t)?;
    Ok(LinePoint {
        position: seg.start + seg.displacement * s.position,
        velocity: seg.displacement * s.velocity,
        acceleration: seg.displacement * s.acceleration,
    })
}
