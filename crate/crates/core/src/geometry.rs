//! Planar pose of a jammed chain and the length of its wire route.
//!
//! Joint `i` (1-based) sits at pivot `c[i-1]`; its angle rotates every part
//! distal to it. Part `i` spans `c[i-1]..c[i]` and the tip is `c[n]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tension::ChainConfig;
use crate::torque::MechanismParams;

/// Signed joint angles in degrees, root first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointAngles(pub Vec<f64>);

impl JointAngles {
    pub fn straight(joint_count: usize) -> Self {
        Self(vec![0.0; joint_count])
    }

    pub fn uniform(joint_count: usize, angle_deg: f64) -> Self {
        Self(vec![angle_deg; joint_count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Fails on the first joint whose magnitude exceeds `limit_deg`.
    pub fn check_range(&self, limit_deg: f64) -> Result<()> {
        for (i, &angle_deg) in self.0.iter().enumerate() {
            if !angle_deg.is_finite() || angle_deg.abs() > limit_deg {
                return Err(Error::AngleOutOfRange {
                    joint: i + 1,
                    angle_deg,
                    limit_deg,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireRoute {
    /// Plain through-hole: the wire runs straight between part centers.
    ThroughHoleStraight,
    /// Conical route: the wire is forced through every pivot center.
    ConicalPivot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Pivot centers followed by the tip (`joint_count + 1` points).
pub fn chain_pose(chain: &ChainConfig, angles: &JointAngles) -> Result<Vec<Point>> {
    chain.validate()?;
    if angles.len() != chain.joint_count {
        return Err(Error::AngleCount {
            expected: chain.joint_count,
            got: angles.len(),
        });
    }
    let d = chain.inter_axial_distance;
    let mut points = Vec::with_capacity(chain.joint_count + 1);
    let mut current = Point { x: 0.0, y: 0.0 };
    let mut heading = 0.0f64;
    points.push(current);
    for &angle in &angles.0 {
        heading += angle.to_radians();
        let (sin, cos) = heading.sin_cos();
        current = Point {
            x: current.x + d * cos,
            y: current.y + d * sin,
        };
        points.push(current);
    }
    Ok(points)
}

/// Waypoints the wire passes through for the given route.
///
/// For the through-hole route the base counts as a part whose center sits
/// half a pitch behind the root pivot; that fixed lead-in is not part of
/// the returned polyline but its endpoint is, so the first segment still
/// reacts to the root joint angle.
fn route_waypoints(pose: &[Point], route: WireRoute, pitch: f64) -> (Vec<Point>, f64) {
    match route {
        WireRoute::ConicalPivot => (pose.to_vec(), 0.0),
        WireRoute::ThroughHoleStraight => {
            let mut pts = Vec::with_capacity(pose.len() + 1);
            pts.push(Point {
                x: -pitch / 2.0,
                y: 0.0,
            });
            pts.extend(pose.windows(2).map(|w| Point {
                x: (w[0].x + w[1].x) / 2.0,
                y: (w[0].y + w[1].y) / 2.0,
            }));
            if let Some(&tip) = pose.last() {
                pts.push(tip);
            }
            (pts, pitch / 2.0)
        }
    }
}

/// Wire length inside the chain, checked against the range of motion.
pub fn wire_path_length(
    chain: &ChainConfig,
    angles: &JointAngles,
    route: WireRoute,
    max_joint_angle_deg: f64,
) -> Result<f64> {
    angles.check_range(max_joint_angle_deg)?;
    let pose = chain_pose(chain, angles)?;
    let (waypoints, lead_in) = route_waypoints(&pose, route, chain.inter_axial_distance);
    let total: f64 = waypoints.windows(2).map(|w| w[0].distance(w[1])).sum();
    Ok(total - lead_in)
}

/// Bending limit per side, in degrees.
///
/// Bead: the wire may swing until it touches the cone wall, i.e. half the
/// apex angle. Comb and radial: the clearance between layers closes at
/// `atan(clearance / radius)`.
pub fn max_joint_angle(params: &MechanismParams) -> f64 {
    match params {
        MechanismParams::Bead(p) => p.cone_apex_angle / 2.0,
        MechanismParams::Comb(p) => (p.clearance / p.plate_radius).atan().to_degrees(),
        MechanismParams::Radial(p) => (p.clearance / p.outer_radius).atan().to_degrees(),
    }
}
