//! Geometric model of the Orthoglide.
//!
//! The fixed frame sits at the intersection of the three prismatic axes, with
//! the x, y and z axes along them. Chain `i` has its actuated slider point
//! `B_i` on axis `i`, a parallelogram leg of length `L` from `B_i` to the
//! platform point `C_i = p`, and a slider body whose far point `A_i` is offset
//! by `l` from the axis. The offset only matters for mass bookkeeping.

use std::fmt;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::newton::{self, NewtonOptions, NewtonReport, System3};
use crate::{Error, Result, Vec3};

/// Tolerance for checking `|B_i − C_i| = L` on externally supplied (p, ρ).
pub const LEG_LENGTH_TOLERANCE: f64 = 1e-9;

/// Residual tolerance of forward kinematics, meters. Tighter than the
/// solver default so that FK∘IK reproduces poses to 1e-9 m at moderate
/// conditioning.
pub const FK_TOLERANCE: f64 = 1e-12;

/// Radicands at or below this value (m²) are reported as on the boundary.
pub const BOUNDARY_RADICAND: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The two axes orthogonal to this one, in cyclic order.
    pub fn others(self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (2, 0),
            Axis::Z => (0, 1),
        }
    }

    pub fn unit(self) -> Vec3 {
        let mut v = Vec3::zeros();
        v[self.index()] = 1.0;
        v
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Branch selector of one chain's inverse kinematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigIndex {
    Plus,
    Minus,
}

impl ConfigIndex {
    pub fn sign(self) -> f64 {
        match self {
            ConfigIndex::Plus => 1.0,
            ConfigIndex::Minus => -1.0,
        }
    }

    /// Accepts exactly `+1` or `-1`.
    pub fn from_sign(value: f64) -> Option<Self> {
        if value == 1.0 {
            Some(ConfigIndex::Plus)
        } else if value == -1.0 {
            Some(ConfigIndex::Minus)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    leg_length: f64,
    slider_offset: f64,
    config: [ConfigIndex; 3],
}

impl GeometryParams {
    pub fn new(leg_length: f64, slider_offset: f64, config: [ConfigIndex; 3]) -> Result<Self> {
        if !(leg_length.is_finite() && leg_length > 0.0) {
            return Err(Error::invalid(
                "L",
                format!("must be > 0, got {leg_length}"),
            ));
        }
        if !(slider_offset.is_finite() && slider_offset >= 0.0) {
            return Err(Error::invalid(
                "l",
                format!("must be >= 0, got {slider_offset}"),
            ));
        }
        Ok(Self {
            leg_length,
            slider_offset,
            config,
        })
    }

    /// The LS2N prototype: L = 0.31 m, l = 0.1 m, all indices +1.
    pub fn prototype() -> Self {
        Self {
            leg_length: 0.31,
            slider_offset: 0.1,
            config: [ConfigIndex::Plus; 3],
        }
    }

    pub fn leg_length(&self) -> f64 {
        self.leg_length
    }

    pub fn slider_offset(&self) -> f64 {
        self.slider_offset
    }

    pub fn config(&self) -> [ConfigIndex; 3] {
        self.config
    }

    pub fn sign(&self, axis: Axis) -> f64 {
        self.config[axis.index()].sign()
    }
}

/// Tool-center-point position in the fixed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformPose(pub Vec3);

impl PlatformPose {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vec3::new(x, y, z))
    }

    pub fn origin() -> Self {
        Self(Vec3::zeros())
    }
}

/// Actuated prismatic joint displacements (ρ_x, ρ_y, ρ_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDisplacements(pub Vec3);

impl JointDisplacements {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vec3::new(x, y, z))
    }
}

/// Outcome of a workspace check: the three radicands `L² − p_j² − p_k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub radicands: [f64; 3],
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.radicands.iter().all(|r| *r >= 0.0)
    }

    /// Feasible but with at least one radicand at (numerically) zero.
    pub fn on_boundary(&self) -> bool {
        self.is_feasible() && self.radicands.iter().any(|r| *r <= BOUNDARY_RADICAND)
    }

    /// Axis with the smallest radicand.
    pub fn worst(&self) -> (Axis, f64) {
        Axis::ALL
            .into_iter()
            .map(|a| (a, self.radicands[a.index()]))
            .fold((Axis::X, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    pub fn check(&self) -> Result<()> {
        let (axis, radicand) = self.worst();
        if radicand >= 0.0 {
            Ok(())
        } else {
            Err(Error::Infeasible { axis, radicand })
        }
    }
}

/// Joint points A_i, B_i, C_i of the three chains, indexed by axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPointSet {
    pub a: [Vec3; 3],
    pub b: [Vec3; 3],
    pub c: [Vec3; 3],
}

pub fn radicands(p: &PlatformPose, g: &GeometryParams) -> [f64; 3] {
    let l2 = g.leg_length * g.leg_length;
    Axis::ALL.map(|axis| {
        let (j, k) = axis.others();
        l2 - p.0[j] * p.0[j] - p.0[k] * p.0[k]
    })
}

pub fn is_feasible(p: &PlatformPose, g: &GeometryParams) -> Feasibility {
    Feasibility {
        radicands: radicands(p, g),
    }
}

/// ρ_i = p_i + s_i·sqrt(L² − p_j² − p_k²) for each axis.
pub fn inverse_kinematics(p: &PlatformPose, g: &GeometryParams) -> Result<JointDisplacements> {
    let feas = is_feasible(p, g);
    feas.check()?;
    let rho = Vec3::from_fn(|i, _| {
        let axis = Axis::ALL[i];
        p.0[i] + g.sign(axis) * feas.radicands[i].sqrt()
    });
    Ok(JointDisplacements(rho))
}

/// Leg-length constraints `|p − ρ_i e_i| − L = 0` for fixed joint values.
struct LegSpheres<'a> {
    rho: &'a Vec3,
    leg_length: f64,
}

impl LegSpheres<'_> {
    fn offsets(&self, p: &Vec3) -> [Vec3; 3] {
        Axis::ALL.map(|a| p - a.unit() * self.rho[a.index()])
    }
}

impl System3 for LegSpheres<'_> {
    fn residual(&self, p: &Vec3) -> Result<Vec3> {
        let d = self.offsets(p);
        Ok(Vec3::from_fn(|i, _| d[i].norm() - self.leg_length))
    }

    fn jacobian(&self, p: &Vec3) -> Result<Matrix3<f64>> {
        let d = self.offsets(p);
        let mut jac = Matrix3::zeros();
        for (i, di) in d.iter().enumerate() {
            let n = di.norm();
            if n == 0.0 {
                return Err(Error::SingularJacobian {
                    residual: self.leg_length,
                });
            }
            jac.set_row(i, &(di / n).transpose());
        }
        Ok(jac)
    }
}

/// Platform position from joint displacements.
///
/// Solves the three leg-sphere constraints by damped Newton iteration from
/// `guess`; the guess selects which intersection of the spheres is returned,
/// and the result is rejected unless it lies on the branch given by the
/// configuration indices.
pub fn forward_kinematics(
    rho: &JointDisplacements,
    g: &GeometryParams,
    guess: &PlatformPose,
) -> Result<PlatformPose> {
    let opts = NewtonOptions {
        tolerance: FK_TOLERANCE,
        ..NewtonOptions::default()
    };
    forward_kinematics_with(rho, g, guess, &opts).map(|r| PlatformPose(r.solution))
}

pub fn forward_kinematics_with(
    rho: &JointDisplacements,
    g: &GeometryParams,
    guess: &PlatformPose,
    opts: &NewtonOptions,
) -> Result<NewtonReport> {
    let two_l = 2.0 * g.leg_length;
    for first in Axis::ALL {
        let (j, _) = first.others();
        let second = Axis::ALL[j];
        let gap = rho.0[first.index()].hypot(rho.0[j]);
        if gap > two_l {
            return Err(Error::NoIntersection { first, second });
        }
    }

    let system = LegSpheres {
        rho: &rho.0,
        leg_length: g.leg_length,
    };
    let report = newton::solve(&system, guess.0, opts)?;
    let p = PlatformPose(report.solution);

    let feas = is_feasible(&p, g);
    for axis in Axis::ALL {
        let i = axis.index();
        let radicand = feas.radicands[i];
        if radicand < -BOUNDARY_RADICAND {
            return Err(Error::BranchMismatch { axis });
        }
        // On the boundary both branches coincide.
        if radicand > BOUNDARY_RADICAND && (rho.0[i] - p.0[i]).signum() != g.sign(axis) {
            return Err(Error::BranchMismatch { axis });
        }
    }
    Ok(report)
}

/// Positions of all joint points for a kinematically consistent (p, ρ).
pub fn joint_points(
    p: &PlatformPose,
    rho: &JointDisplacements,
    g: &GeometryParams,
) -> Result<JointPointSet> {
    let l = g.slider_offset;
    let (rx, ry, rz) = (rho.0.x, rho.0.y, rho.0.z);
    let set = JointPointSet {
        a: [
            Vec3::new(rx + l, 0.0, l),
            Vec3::new(l, ry + l, 0.0),
            Vec3::new(0.0, l, rz + l),
        ],
        b: [
            Vec3::new(rx, 0.0, 0.0),
            Vec3::new(0.0, ry, 0.0),
            Vec3::new(0.0, 0.0, rz),
        ],
        c: [p.0; 3],
    };
    for chain in 0..3 {
        let actual = (set.b[chain] - set.c[chain]).norm();
        if (actual - g.leg_length).abs() > LEG_LENGTH_TOLERANCE {
            return Err(Error::LegLength {
                chain: chain + 1,
                expected: g.leg_length,
                actual,
            });
        }
    }
    Ok(set)
}
