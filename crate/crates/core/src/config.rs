//! Mechanism config files and the bundled part presets.
//!
//! A config is a TOML document:
//!
//! ```toml
//! mechanism = "radial"
//! units = "mm"
//! outer_radius = 7.5
//! layer_count = 3
//! wall_thickness = 0.90
//! clearance = 1.05
//! inter_axial_distance = 9.1
//! mu = 0.51
//! attenuation.k = 0.97
//! ```
//!
//! `units` only scales lengths; angles are always degrees and tensions
//! newtons. Unknown keys and keys belonging to another family are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiments::{anchor_torque, calibrate_to_anchor, ANCHOR_JOINT};
use crate::geometry::max_joint_angle;
use crate::mechanism::Mechanism;
use crate::tension::{AttenuationModel, ChainConfig};
use crate::torque::{BeadParams, CombParams, Family, Material, MechanismParams, RadialParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Mm,
}

impl Units {
    fn length_scale(self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::Mm => 1e-3,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttenuation {
    k: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mechanism: Family,
    units: Units,
    mu: f64,
    inter_axial_distance: f64,
    lever_arm: Option<f64>,
    attenuation: Option<RawAttenuation>,
    #[serde(rename = "engagement_tension_N")]
    engagement_tension: Option<f64>,
    max_joint_angle_deg: Option<f64>,

    contact_radius: Option<f64>,
    cone_apex_angle_deg: Option<f64>,

    plate_radius: Option<f64>,
    plate_count: Option<u32>,
    plate_thickness: Option<f64>,
    training_angle_deg: Option<f64>,

    outer_radius: Option<f64>,
    layer_count: Option<u32>,
    wall_thickness: Option<f64>,

    clearance: Option<f64>,
}

impl RawConfig {
    fn family_keys(&self) -> [(&'static str, bool, &'static [Family]); 9] {
        use Family::*;
        [
            ("contact_radius", self.contact_radius.is_some(), &[Bead]),
            ("cone_apex_angle_deg", self.cone_apex_angle_deg.is_some(), &[Bead]),
            ("plate_radius", self.plate_radius.is_some(), &[Comb]),
            ("plate_count", self.plate_count.is_some(), &[Comb]),
            ("plate_thickness", self.plate_thickness.is_some(), &[Comb]),
            ("training_angle_deg", self.training_angle_deg.is_some(), &[Comb]),
            ("outer_radius", self.outer_radius.is_some(), &[Radial]),
            ("layer_count", self.layer_count.is_some(), &[Radial]),
            ("wall_thickness", self.wall_thickness.is_some(), &[Radial]),
        ]
    }
}

fn required<T>(value: Option<T>, key: &str, family: Family) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("{family} config is missing `{key}`")))
}

/// A loaded mechanism together with the chain geometry it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismConfig {
    pub mechanism: Mechanism,
    pub inter_axial_distance: f64,
    pub lever_arm: f64,
}

impl MechanismConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let family = raw.mechanism;

        for (key, present, families) in raw.family_keys() {
            if present && !families.contains(&family) {
                return Err(Error::Config(format!("key `{key}` does not apply to {family}")));
            }
        }
        if family == Family::Bead && raw.clearance.is_some() {
            return Err(Error::Config("key `clearance` does not apply to bead".into()));
        }

        let len = raw.units.length_scale();
        let material = Material::new(raw.mu)?;
        let params = match family {
            Family::Bead => MechanismParams::Bead(BeadParams {
                contact_radius: required(raw.contact_radius, "contact_radius", family)? * len,
                cone_apex_angle: raw.cone_apex_angle_deg.unwrap_or(70.0),
                material,
            }),
            Family::Comb => MechanismParams::Comb(CombParams {
                plate_radius: required(raw.plate_radius, "plate_radius", family)? * len,
                plate_count: required(raw.plate_count, "plate_count", family)?,
                plate_thickness: required(raw.plate_thickness, "plate_thickness", family)? * len,
                clearance: required(raw.clearance, "clearance", family)? * len,
                training_angle: raw.training_angle_deg.unwrap_or(45.0),
                material,
            }),
            Family::Radial => MechanismParams::Radial(RadialParams {
                outer_radius: required(raw.outer_radius, "outer_radius", family)? * len,
                layer_count: required(raw.layer_count, "layer_count", family)?,
                wall_thickness: required(raw.wall_thickness, "wall_thickness", family)? * len,
                clearance: required(raw.clearance, "clearance", family)? * len,
                material,
            }),
        };

        let attenuation = match raw.attenuation {
            Some(a) => AttenuationModel::new(a.k)?,
            None => AttenuationModel::default_for(family),
        };
        let mechanism = Mechanism {
            params,
            attenuation,
            engagement_tension: raw.engagement_tension.unwrap_or(0.0),
            max_joint_angle: raw.max_joint_angle_deg,
        };
        mechanism.validate()?;
        if let Some(limit) = mechanism.max_joint_angle {
            if !(limit > 0.0 && limit <= 180.0) {
                return Err(Error::Config(format!(
                    "max_joint_angle_deg = {limit} must lie in (0, 180]"
                )));
            }
        }

        let config = Self {
            mechanism,
            inter_axial_distance: raw.inter_axial_distance * len,
            lever_arm: raw.lever_arm.map_or(ChainConfig::DEFAULT_LEVER_ARM, |l| l * len),
        };
        config.chain(1, 0.0)?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Chain of `joint_count` of these parts pulled with `root_tension`.
    pub fn chain(&self, joint_count: usize, root_tension: f64) -> Result<ChainConfig> {
        let chain = ChainConfig {
            joint_count,
            inter_axial_distance: self.inter_axial_distance,
            lever_arm: self.lever_arm,
            root_tension,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn max_joint_angle(&self) -> f64 {
        self.mechanism
            .max_joint_angle
            .unwrap_or_else(|| max_joint_angle(&self.mechanism.params))
    }
}

/// Part geometry of the three prototypes with `mu` left at 1.
pub fn prototype_geometry(family: Family) -> MechanismConfig {
    let material = Material { mu: 1.0 };
    let (params, inter_axial_distance) = match family {
        Family::Bead => (
            MechanismParams::Bead(BeadParams {
                contact_radius: 12.0e-3 / 2.0,
                cone_apex_angle: 70.0,
                material,
            }),
            6.0e-3,
        ),
        Family::Comb => (
            MechanismParams::Comb(CombParams {
                plate_radius: 12.0e-3 / 2.0,
                plate_count: 5,
                plate_thickness: 1.10e-3,
                clearance: 1.12e-3,
                training_angle: 45.0,
                material,
            }),
            30.0e-3,
        ),
        Family::Radial => (
            MechanismParams::Radial(RadialParams {
                outer_radius: 15.0e-3 / 2.0,
                layer_count: 3,
                wall_thickness: 0.90e-3,
                clearance: 1.05e-3,
                material,
            }),
            9.1e-3,
        ),
    };
    MechanismConfig {
        mechanism: Mechanism::new(params, AttenuationModel::default_for(family)),
        inter_axial_distance,
        lever_arm: ChainConfig::DEFAULT_LEVER_ARM,
    }
}

/// Prototype geometry with `mu` fitted so joint 4 of a 50 N chain holds the
/// reference torque.
pub fn calibrated_preset(family: Family) -> Result<MechanismConfig> {
    let base = prototype_geometry(family);
    let chain = base.chain(ANCHOR_JOINT, ChainConfig::DEFAULT_ROOT_TENSION)?;
    let mechanism = calibrate_to_anchor(&base.mechanism, &chain, ANCHOR_JOINT, anchor_torque(family))?;
    Ok(MechanismConfig { mechanism, ..base })
}

/// Bundled preset file contents.
pub fn bundled_preset_text(family: Family) -> &'static str {
    match family {
        Family::Bead => include_str!("../presets/bead.tbl1"),
        Family::Comb => include_str!("../presets/comb.tbl1"),
        Family::Radial => include_str!("../presets/radial.tbl1"),
    }
}

pub fn bundled_preset(family: Family) -> Result<MechanismConfig> {
    MechanismConfig::from_toml_str(bundled_preset_text(family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const RADIAL_MM: &str = r#"
mechanism = "radial"
units = "mm"
outer_radius = 7.5
layer_count = 3
wall_thickness = 0.90
clearance = 1.05
inter_axial_distance = 9.1
mu = 0.5
attenuation.k = 0.97
"#;

    #[test]
    fn parses_mm_and_converts() {
        let cfg = MechanismConfig::from_toml_str(RADIAL_MM).unwrap();
        match cfg.mechanism.params {
            MechanismParams::Radial(p) => {
                assert_relative_eq!(p.outer_radius, 0.0075, max_relative = 1e-12);
                assert_relative_eq!(p.clearance, 0.00105, max_relative = 1e-12);
                assert_eq!(p.layer_count, 3);
            }
            other => panic!("{other:?}"),
        }
        assert_relative_eq!(cfg.inter_axial_distance, 0.0091, max_relative = 1e-12);
        assert_eq!(cfg.lever_arm, 0.122);
        assert_eq!(cfg.mechanism.attenuation.retention_per_joint, 0.97);
    }

    #[test]
    fn rejects_unknown_and_foreign_keys() {
        let unknown = format!("{RADIAL_MM}\nbogus = 1\n");
        assert!(MechanismConfig::from_toml_str(&unknown).is_err());
        let foreign = format!("{RADIAL_MM}\nplate_count = 4\n");
        let err = MechanismConfig::from_toml_str(&foreign).unwrap_err();
        assert!(err.to_string().contains("plate_count"), "{err}");
        let bad_attenuation = RADIAL_MM.replace("attenuation.k = 0.97", "attenuation.q = 0.97");
        assert!(MechanismConfig::from_toml_str(&bad_attenuation).is_err());
    }

    #[test]
    fn revalidates_after_unit_conversion() {
        let bad = RADIAL_MM.replace("outer_radius = 7.5", "outer_radius = 2.0");
        assert!(MechanismConfig::from_toml_str(&bad).is_err());
        let missing = RADIAL_MM.replace("layer_count = 3\n", "");
        assert!(MechanismConfig::from_toml_str(&missing)
            .unwrap_err()
            .to_string()
            .contains("layer_count"));
    }

    #[test]
    fn bundled_presets_match_fresh_calibration() {
        for family in Family::ALL {
            let bundled = bundled_preset(family).unwrap();
            let fresh = calibrated_preset(family).unwrap();
            assert_eq!(bundled.mechanism.family(), family);
            assert_relative_eq!(
                bundled.mechanism.params.material().mu,
                fresh.mechanism.params.material().mu,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                bundled.inter_axial_distance,
                fresh.inter_axial_distance,
                max_relative = 1e-12
            );
            assert_eq!(bundled.mechanism.attenuation, fresh.mechanism.attenuation);
            assert_relative_eq!(
                bundled.mechanism.params.torque_gain().unwrap(),
                fresh.mechanism.params.torque_gain().unwrap(),
                max_relative = 1e-12
            );
        }
    }
}
