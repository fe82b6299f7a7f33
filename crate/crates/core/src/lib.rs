//! Shaking-force balancing of the Orthoglide parallel manipulator.
//!
//! The Orthoglide is a 3-DOF translational parallel robot with three orthogonal
//! actuated prismatic joints. Its shaking force is the total moving mass times
//! the acceleration of the common center of mass (COM), so it can be reduced by
//! planning the COM itself along a straight line with a bang-bang law instead of
//! moving the platform along a straight line with a quintic law.
//!
//! Module map:
//!
//! - [`geometry`]: inverse/forward kinematics, workspace feasibility, joint points.
//! - [`mass_model`]: lumped-mass model and the three equivalent COM routes.
//! - [`profiles`]: bang-bang and quintic motion laws.
//! - [`planner`]: platform-line and COM-line trajectory generation.
//! - [`dynamics`]: shaking force / moment series and case comparison.
//! - [`scenario`]: JSON scenario configs, validation, CSV and summary output.
//! - [`batch`]: data-parallel sweeps over poses and requests.
//!
//! Data-parallel work goes through [`par`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iterators otherwise.

pub mod batch;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod mass_model;
pub mod newton;
pub mod par;
pub mod planner;
pub mod profiles;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::{Axis, ConfigIndex, GeometryParams, JointDisplacements, PlatformPose};
pub use mass_model::{ComPosition, MassParams};
pub use planner::{PlanMode, PlanRequest, Trajectory};
pub use profiles::{ProfileKind, ProfileSpec};

/// Plain 3-vector in the fixed frame, meters unless stated otherwise.
pub type Vec3 = nalgebra::Vector3<f64>;
