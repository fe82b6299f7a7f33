//! Lumped-mass model of the moving links and the common center of mass.
//!
//! Each parallelogram is a point mass `m1` at the midpoint of `B_i C_i`, each
//! slider body a point mass `m2` at the midpoint of `A_i B_i`, and the platform
//! a point mass `m3` at `p`. The COM is available through three routes that
//! must agree: the weighted mean of the seven points, the closed form in
//! (p, ρ), and the closed form in `p` alone with ρ eliminated through IK.

use nalgebra::Matrix3;

use crate::geometry::{self, Axis, GeometryParams, JointDisplacements, PlatformPose};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParams {
    parallelogram: f64,
    input_link: f64,
    platform: f64,
}

impl MassParams {
    /// `m1` per parallelogram, `m2` per slider body, `m3` for the platform.
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        for (field, m) in [("m1", m1), ("m2", m2), ("m3", m3)] {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::invalid(field, format!("must be >= 0, got {m}")));
            }
        }
        let mp = Self {
            parallelogram: m1,
            input_link: m2,
            platform: m3,
        };
        if mp.total() <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(mp)
    }

    /// Link masses of the LS2N prototype.
    pub fn prototype() -> Self {
        Self {
            parallelogram: 0.396,
            input_link: 0.248,
            platform: 0.905,
        }
    }

    pub fn m1(&self) -> f64 {
        self.parallelogram
    }

    pub fn m2(&self) -> f64 {
        self.input_link
    }

    pub fn m3(&self) -> f64 {
        self.platform
    }

    /// Total moving mass `M = 3(m1 + m2) + m3`.
    pub fn total(&self) -> f64 {
        3.0 * (self.parallelogram + self.input_link) + self.platform
    }

    /// Every mass multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.parallelogram * factor,
            self.input_link * factor,
            self.platform * factor,
        )
    }
}

/// Common center of mass of the moving links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComPosition(pub Vec3);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Parallelogram(Axis),
    InputLink(Axis),
    Platform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub kind: LinkKind,
    pub position: Vec3,
    pub mass: f64,
}

/// Seven point masses: parallelograms x, y, z, then input links x, y, z, then
/// the platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedPointSet {
    pub points: [PointMass; 7],
}

impl LumpedPointSet {
    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|pm| pm.mass).sum()
    }
}

pub fn lumped_points(
    p: &PlatformPose,
    rho: &JointDisplacements,
    g: &GeometryParams,
    mp: &MassParams,
) -> Result<LumpedPointSet> {
    let joints = geometry::joint_points(p, rho, g)?;
    let bar = |axis: Axis| {
        let i = axis.index();
        PointMass {
            kind: LinkKind::Parallelogram(axis),
            position: (joints.b[i] + joints.c[i]) * 0.5,
            mass: mp.m1(),
        }
    };
    let slider = |axis: Axis| {
        let i = axis.index();
        PointMass {
            kind: LinkKind::InputLink(axis),
            position: (joints.a[i] + joints.b[i]) * 0.5,
            mass: mp.m2(),
        }
    };
    Ok(LumpedPointSet {
        points: [
            bar(Axis::X),
            bar(Axis::Y),
            bar(Axis::Z),
            slider(Axis::X),
            slider(Axis::Y),
            slider(Axis::Z),
            PointMass {
                kind: LinkKind::Platform,
                position: p.0,
                mass: mp.m3(),
            },
        ],
    })
}

/// Mass-weighted mean of the lumped points.
pub fn com_from_points(pts: &LumpedPointSet) -> Result<ComPosition> {
    let total = pts.total_mass();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let moment: Vec3 = pts.points.iter().map(|pm| pm.position * pm.mass).sum();
    Ok(ComPosition(moment / total))
}

/// `S_i = [m1(ρ_i + 3p_i)/2 + m2(ρ_i + l) + m3 p_i] / M` for each axis.
pub fn com_closed_form(
    p: &PlatformPose,
    rho: &JointDisplacements,
    g: &GeometryParams,
    mp: &MassParams,
) -> ComPosition {
    let (m1, m2, m3) = (mp.m1(), mp.m2(), mp.m3());
    let l = g.slider_offset();
    let s = rho.0.zip_map(&p.0, |r, pi| {
        m1 * (r + 3.0 * pi) / 2.0 + m2 * (r + l) + m3 * pi
    });
    ComPosition(s / mp.total())
}

/// COM as a function of the platform position alone (ρ eliminated via IK).
pub fn com_of_pose(p: &PlatformPose, g: &GeometryParams, mp: &MassParams) -> Result<ComPosition> {
    let feas = geometry::is_feasible(p, g);
    feas.check()?;
    let (m1, m2, m3) = (mp.m1(), mp.m2(), mp.m3());
    let leg_weight = m1 / 2.0 + m2;
    let pose_weight = 2.0 * m1 + m2 + m3;
    let offset = m2 * g.slider_offset();
    let s = Vec3::from_fn(|i, _| {
        let axis = Axis::ALL[i];
        g.sign(axis) * leg_weight * feas.radicands[i].sqrt() + pose_weight * p.0[i] + offset
    });
    Ok(ComPosition(s / mp.total()))
}

/// Jacobian ∂S/∂p of [`com_of_pose`].
///
/// Diagonal entries are `(2m1 + m2 + m3)/M`; entry (i, j) off the diagonal is
/// `−s_i (m1/2 + m2) p_j / (M sqrt(radicand_i))`. Singular where a radicand
/// vanishes.
pub fn com_jacobian(p: &PlatformPose, g: &GeometryParams, mp: &MassParams) -> Result<Matrix3<f64>> {
    let feas = geometry::is_feasible(p, g);
    feas.check()?;
    if feas.on_boundary() {
        let (axis, radicand) = feas.worst();
        return Err(Error::WorkspaceBoundary { axis, radicand });
    }
    let total = mp.total();
    let leg_weight = (mp.m1() / 2.0 + mp.m2()) / total;
    let diag = (2.0 * mp.m1() + mp.m2() + mp.m3()) / total;
    let mut jac = Matrix3::from_diagonal_element(diag);
    for axis in Axis::ALL {
        let i = axis.index();
        let root = feas.radicands[i].sqrt();
        let (j, k) = axis.others();
        for col in [j, k] {
            jac[(i, col)] = -g.sign(axis) * leg_weight * p.0[col] / root;
        }
    }
    Ok(jac)
}
