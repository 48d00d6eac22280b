//! Per-joint loss of wire tension along a chain.
//!
//! Each joint passes on a fixed fraction `k` of the tension it receives, so
//! joint `i` (1 at the actuator end) sees `T_root * k^(i-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::mechanism::Mechanism;
use crate::torque::Family;

/// Retained fraction of wire tension per joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttenuationModel {
    pub retention_per_joint: f64,
}

impl AttenuationModel {
    pub const LOSSLESS: Self = Self {
        retention_per_joint: 1.0,
    };

    pub fn new(retention_per_joint: f64) -> Result<Self> {
        let m = Self {
            retention_per_joint,
        };
        m.validate()?;
        Ok(m)
    }

    /// Default per-family retention: 6 % loss per joint for comb, a quarter
    /// of that for bead and half of it for radial.
    pub fn default_for(family: Family) -> Self {
        let retention_per_joint = match family {
            Family::Bead => 1.0 - 0.06 / 4.0,
            Family::Comb => 1.0 - 0.06,
            Family::Radial => 1.0 - 0.06 / 2.0,
        };
        Self {
            retention_per_joint,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.retention_per_joint;
        if k > 0.0 && k <= 1.0 {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                name: "retention_per_joint",
                value: k,
                range: "(0, 1]",
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub joint_count: usize,
    pub inter_axial_distance: f64,
    /// Distance from the measured joint to the loaded chain end (m).
    pub lever_arm: f64,
    pub root_tension: f64,
}

impl ChainConfig {
    pub const DEFAULT_LEVER_ARM: f64 = 0.122;
    pub const DEFAULT_ROOT_TENSION: f64 = 50.0;

    pub fn validate(&self) -> Result<()> {
        if self.joint_count == 0 {
            return Err(Error::InvalidParams("joint_count must be at least 1".into()));
        }
        positive("inter_axial_distance", self.inter_axial_distance)?;
        positive("lever_arm", self.lever_arm)?;
        non_negative("root_tension", self.root_tension)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub joint_index: usize,
    pub tension: f64,
    pub torque: f64,
}

/// Holding torque at each joint of a chain, root first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorqueProfile {
    pub mechanism: Family,
    pub entries: Vec<ProfileEntry>,
}

impl TorqueProfile {
    pub fn torque_at(&self, joint_index: usize) -> Option<f64> {
        joint_index
            .checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|e| e.torque)
    }

    pub fn root_torque(&self) -> f64 {
        self.entries.first().map_or(0.0, |e| e.torque)
    }

    pub fn tip_torque(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.torque)
    }
}

pub fn joint_tension(root_tension: f64, model: AttenuationModel, joint_index: usize) -> Result<f64> {
    if joint_index < 1 {
        return Err(Error::InvalidParams("joint_index is 1-based".into()));
    }
    model.validate()?;
    let root_tension = non_negative("root_tension", root_tension)?;
    let steps = i32::try_from(joint_index - 1)
        .map_err(|_| Error::InvalidParams(format!("joint_index {joint_index} too large")))?;
    Ok(root_tension * model.retention_per_joint.powi(steps))
}

pub fn tip_torque_profile(mech: &Mechanism, chain: &ChainConfig) -> Result<TorqueProfile> {
    mech.validate()?;
    chain.validate()?;
    let entries = (1..=chain.joint_count)
        .map(|joint_index| {
            let tension = joint_tension(chain.root_tension, mech.attenuation, joint_index)?;
            Ok(ProfileEntry {
                joint_index,
                tension,
                torque: mech.torque_at(tension)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorqueProfile {
        mechanism: mech.family(),
        entries,
    })
}

/// Smallest joint count `n` after which tension has dropped to half or less.
pub fn halving_joint(model: AttenuationModel) -> Result<usize> {
    model.validate()?;
    let k = model.retention_per_joint;
    if k >= 1.0 {
        return Err(Error::NoHalving);
    }
    // Closed form first, then nudge for rounding at exact powers.
    let mut n = ((0.5f64).ln() / k.ln()).ceil().max(1.0) as usize;
    while n > 1 && k.powi(n as i32 - 1) <= 0.5 {
        n -= 1;
    }
    while k.powi(n as i32) > 0.5 {
        n += 1;
    }
    Ok(n)
}

/// First joint at which mechanism `a` holds at least as much as `b`.
pub fn crossover_joint(a: &Mechanism, b: &Mechanism, chain: &ChainConfig) -> Result<Option<usize>> {
    let pa = tip_torque_profile(a, chain)?;
    let pb = tip_torque_profile(b, chain)?;
    Ok(pa
        .entries
        .iter()
        .zip(&pb.entries)
        .find(|(ea, eb)| ea.torque >= eb.torque)
        .map(|(ea, _)| ea.joint_index))
}
