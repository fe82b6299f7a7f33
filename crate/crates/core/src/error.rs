use thiserror::Error;

use crate::geometry::Axis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("pose outside the workspace: {axis} radicand is {radicand:.3e} m^2")]
    Infeasible { axis: Axis, radicand: f64 },

    #[error(
        "pose on the workspace boundary ({axis} radicand {radicand:.3e} m^2), Jacobian is singular"
    )]
    WorkspaceBoundary { axis: Axis, radicand: f64 },

    #[error("chain {chain} leg length {actual:.12} m differs from L = {expected:.12} m")]
    LegLength {
        chain: usize,
        expected: f64,
        actual: f64,
    },

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e} m)")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("solver stalled: no damped step reduced the residual {residual:.3e} m")]
    Stalled { residual: f64 },

    #[error("singular Jacobian at residual {residual:.3e} m")]
    SingularJacobian { residual: f64 },

    #[error("leg spheres of chains {first} and {second} do not intersect")]
    NoIntersection { first: Axis, second: Axis },

    #[error("joint displacements are inconsistent with configuration indices on {axis}")]
    BranchMismatch { axis: Axis },

    #[error("time {t} s outside [0, {duration}] s")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("zero total mass")]
    ZeroMass,

    #[error("planning failed at t = {t:.6} s: {source}")]
    Planning { t: f64, source: Box<Error> },

    #[error("time grid is not uniform at sample {index}")]
    NonUniformGrid { index: usize },

    #[error("trajectory too short: {samples} samples, need at least {required}")]
    TooFewSamples { samples: usize, required: usize },

    #[error("trajectories describe different scenarios: {0}")]
    ScenarioMismatch(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_time(self, t: f64) -> Self {
        Error::Planning {
            t,
            source: Box::new(self),
        }
    }
}
