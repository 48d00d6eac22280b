use serde::{Deserialize, Serialize};

use crate::error::{non_negative, Result};
use crate::tension::AttenuationModel;
use crate::torque::{Family, MechanismParams};

/// A joint model together with its chain-level behavior: how much tension
/// survives each joint and how much tension is spent before the layers
/// engage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub params: MechanismParams,
    pub attenuation: AttenuationModel,
    /// Tension below which no holding torque develops (N).
    pub engagement_tension: f64,
    /// Overrides the geometric range-of-motion rule when set (deg).
    pub max_joint_angle: Option<f64>,
}

impl Mechanism {
    pub fn new(params: MechanismParams, attenuation: AttenuationModel) -> Self {
        Self {
            params,
            attenuation,
            engagement_tension: 0.0,
            max_joint_angle: None,
        }
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.attenuation.validate()?;
        non_negative("engagement_tension", self.engagement_tension)?;
        Ok(())
    }

    /// Tension that actually loads the contacts.
    pub fn effective_tension(&self, tension: f64) -> Result<f64> {
        let tension = non_negative("tension", tension)?;
        Ok((tension - self.engagement_tension).max(0.0))
    }

    /// Holding torque of one joint that sees wire tension `tension`.
    pub fn torque_at(&self, tension: f64) -> Result<f64> {
        self.params.holding_torque(self.effective_tension(tension)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torque::{BeadParams, Material};

    #[test]
    fn engagement_shifts_the_line() {
        let params = MechanismParams::Bead(BeadParams {
            contact_radius: 0.006,
            cone_apex_angle: 70.0,
            material: Material { mu: 0.4 },
        });
        let mut m = Mechanism::new(params, AttenuationModel::LOSSLESS);
        m.engagement_tension = 10.0;
        assert_eq!(m.torque_at(5.0).unwrap(), 0.0);
        assert_eq!(m.torque_at(10.0).unwrap(), 0.0);
        assert!((m.torque_at(60.0).unwrap() - 0.4 * 0.006 * 50.0).abs() < 1e-15);
        assert!(m.torque_at(-1.0).is_err());
    }
}
