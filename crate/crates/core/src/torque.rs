//! Holding-torque models for the three jamming families.
//!
//! * bead: one conical contact surface, `tau = mu * R * T`
//! * comb: `2a - 1` flat annular contacts under a pulley-generated normal
//!   load, each contributing the uniform-pressure disc friction torque
//! * radial: concentric cylinders, `tau = mu * T * sum(R_i)`
//!
//! All quantities are SI (m, N, N·m); angles are degrees.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::par::{self, Execution};

/// Coulomb friction coefficient of the contacting surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub mu: f64,
}

impl Material {
    pub fn new(mu: f64) -> Result<Self> {
        non_negative("mu", mu).map(|mu| Self { mu })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bead,
    Comb,
    Radial,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bead, Family::Comb, Family::Radial];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Bead => "bead",
            Family::Comb => "comb",
            Family::Radial => "radial",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bead" => Ok(Family::Bead),
            "comb" => Ok(Family::Comb),
            "radial" => Ok(Family::Radial),
            other => Err(Error::InvalidParams(format!(
                "unknown mechanism `{other}` (expected bead, comb or radial)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeadParams {
    pub contact_radius: f64,
    /// Full apex angle of the conical wire route.
    pub cone_apex_angle: f64,
    pub material: Material,
}

impl BeadParams {
    pub fn validate(&self) -> Result<()> {
        positive("contact_radius", self.contact_radius)?;
        open_interval("cone_apex_angle", self.cone_apex_angle, 0.0, 180.0, "(0, 180) deg")?;
        non_negative("mu", self.material.mu)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombParams {
    pub plate_radius: f64,
    pub plate_count: u32,
    pub plate_thickness: f64,
    pub clearance: f64,
    /// Wire training angle; the wire wraps its pulley by twice this angle.
    pub training_angle: f64,
    pub material: Material,
}

impl CombParams {
    pub fn validate(&self) -> Result<()> {
        positive("plate_radius", self.plate_radius)?;
        positive("plate_thickness", self.plate_thickness)?;
        positive("clearance", self.clearance)?;
        if self.plate_count == 0 {
            return Err(Error::InvalidParams("plate_count must be at least 1".into()));
        }
        open_interval("training_angle", self.training_angle, 0.0, 90.0, "(0, 90) deg")?;
        non_negative("mu", self.material.mu)?;
        Ok(())
    }

    /// Number of sliding contacts in the laminate.
    pub fn contact_surfaces(&self) -> u32 {
        2 * self.plate_count - 1
    }

    pub fn wrap_angle(&self) -> f64 {
        2.0 * self.training_angle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialParams {
    pub outer_radius: f64,
    pub layer_count: u32,
    pub wall_thickness: f64,
    pub clearance: f64,
    pub material: Material,
}

impl RadialParams {
    pub fn validate(&self) -> Result<()> {
        positive("outer_radius", self.outer_radius)?;
        positive("wall_thickness", self.wall_thickness)?;
        positive("clearance", self.clearance)?;
        if self.layer_count == 0 {
            return Err(Error::InvalidParams("layer_count must be at least 1".into()));
        }
        non_negative("mu", self.material.mu)?;
        // The innermost wall must keep a positive bore.
        let stack = f64::from(self.layer_count) * self.pitch() - self.clearance;
        if self.outer_radius <= stack {
            return Err(Error::InvalidParams(format!(
                "outer_radius {} m cannot hold {} walls of pitch {} m",
                self.outer_radius,
                self.layer_count,
                self.pitch()
            )));
        }
        Ok(())
    }

    fn pitch(&self) -> f64 {
        self.wall_thickness + self.clearance
    }

    fn radius_of_layer(&self, i: u32) -> f64 {
        self.outer_radius - f64::from(i) * self.pitch()
    }
}

/// Geometry and friction of one joint of any family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "lowercase")]
pub enum MechanismParams {
    Bead(BeadParams),
    Comb(CombParams),
    Radial(RadialParams),
}

impl MechanismParams {
    pub fn family(&self) -> Family {
        match self {
            MechanismParams::Bead(_) => Family::Bead,
            MechanismParams::Comb(_) => Family::Comb,
            MechanismParams::Radial(_) => Family::Radial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MechanismParams::Bead(p) => p.validate(),
            MechanismParams::Comb(p) => p.validate(),
            MechanismParams::Radial(p) => p.validate(),
        }
    }

    pub fn material(&self) -> Material {
        match self {
            MechanismParams::Bead(p) => p.material,
            MechanismParams::Comb(p) => p.material,
            MechanismParams::Radial(p) => p.material,
        }
    }

    pub fn with_material(mut self, material: Material) -> Self {
        match &mut self {
            MechanismParams::Bead(p) => p.material = material,
            MechanismParams::Comb(p) => p.material = material,
            MechanismParams::Radial(p) => p.material = material,
        }
        self
    }

    /// Characteristic radius: bead contact, comb plate, or radial outer wall.
    pub fn radius(&self) -> f64 {
        match self {
            MechanismParams::Bead(p) => p.contact_radius,
            MechanismParams::Comb(p) => p.plate_radius,
            MechanismParams::Radial(p) => p.outer_radius,
        }
    }

    pub fn width(&self) -> f64 {
        2.0 * self.radius()
    }

    /// Plates or layers per joint; 1 for bead.
    pub fn part_count(&self) -> u32 {
        match self {
            MechanismParams::Bead(_) => 1,
            MechanismParams::Comb(p) => p.plate_count,
            MechanismParams::Radial(p) => p.layer_count,
        }
    }

    /// Holding torque per unit mu per unit wire tension (m).
    ///
    /// Every model is `tau = mu * gain * T`, so this is what calibration
    /// divides by.
    pub fn torque_gain(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            MechanismParams::Bead(p) => p.contact_radius,
            MechanismParams::Comb(p) => {
                let load_per_tension = normal_load_from_tension(1.0, p.wrap_angle())?;
                f64::from(p.contact_surfaces()) * 2.0 / 3.0 * p.plate_radius * load_per_tension
            }
            MechanismParams::Radial(p) => layer_radii(p)?.iter().sum(),
        })
    }

    /// Single-joint holding torque at wire tension `tension`.
    pub fn holding_torque(&self, tension: f64) -> Result<f64> {
        match self {
            MechanismParams::Bead(p) => bead_holding_torque(p, tension),
            MechanismParams::Comb(p) => {
                let load = normal_load_from_tension(tension, p.wrap_angle())?;
                comb_holding_torque(p, load)
            }
            MechanismParams::Radial(p) => radial_holding_torque(p, tension),
        }
    }

    /// Material cross-section area (m²): solid disc, disc stack, or annuli.
    pub fn weight_proxy(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            MechanismParams::Bead(p) => PI * p.contact_radius.powi(2),
            MechanismParams::Comb(p) => f64::from(p.plate_count) * PI * p.plate_radius.powi(2),
            MechanismParams::Radial(p) => layer_radii(p)?
                .iter()
                .map(|&r| {
                    let inner = (r - p.wall_thickness).max(0.0);
                    PI * (r * r - inner * inner)
                })
                .sum(),
        })
    }
}

fn open_interval(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<f64> {
    if value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

pub fn bead_holding_torque(params: &BeadParams, tension: f64) -> Result<f64> {
    params.validate()?;
    let tension = non_negative("tension", tension)?;
    Ok(params.material.mu * params.contact_radius * tension)
}

/// Friction torque of a flat circular contact under uniform pressure:
/// `(2/3) * mu * F_n * R`.
pub fn disc_friction_torque(mu: f64, normal_load: f64, radius: f64) -> Result<f64> {
    let mu = non_negative("mu", mu)?;
    let normal_load = non_negative("normal_load", normal_load)?;
    let radius = non_negative("radius", radius)?;
    Ok(2.0 / 3.0 * mu * normal_load * radius)
}

/// Midpoint-rule evaluation of the disc friction integral in polar cells.
pub fn disc_friction_torque_numeric(
    mu: f64,
    normal_load: f64,
    radius: f64,
    radial_cells: usize,
    angular_cells: usize,
) -> Result<f64> {
    disc_friction_torque_numeric_with(
        Execution::default(),
        mu,
        normal_load,
        radius,
        radial_cells,
        angular_cells,
    )
}

pub fn disc_friction_torque_numeric_with(
    exec: Execution,
    mu: f64,
    normal_load: f64,
    radius: f64,
    radial_cells: usize,
    angular_cells: usize,
) -> Result<f64> {
    let mu = non_negative("mu", mu)?;
    let normal_load = non_negative("normal_load", normal_load)?;
    let radius = non_negative("radius", radius)?;
    if radial_cells == 0 || angular_cells == 0 {
        return Err(Error::InvalidParams(
            "quadrature needs at least one radial and one angular cell".into(),
        ));
    }
    if radius == 0.0 || normal_load == 0.0 || mu == 0.0 {
        return Ok(0.0);
    }

    let pressure = normal_load / (PI * radius * radius);
    let dr = radius / radial_cells as f64;
    let dtheta = 2.0 * PI / angular_cells as f64;

    // The integrand mu * p * r^2 does not depend on theta, but the cells are
    // still summed individually so the rule is the plain 2D midpoint rule.
    let rows = par::map_indexed(exec, radial_cells, |i| {
        let r = (i as f64 + 0.5) * dr;
        let cell = mu * pressure * r * r * dr * dtheta;
        (0..angular_cells).map(|_| cell).sum::<f64>()
    });
    Ok(rows.into_iter().sum())
}

/// Total comb torque: every one of the `2a - 1` contacts carries the full
/// normal load.
pub fn comb_holding_torque(params: &CombParams, normal_load: f64) -> Result<f64> {
    params.validate()?;
    let per_surface = disc_friction_torque(params.material.mu, normal_load, params.plate_radius)?;
    Ok(f64::from(params.contact_surfaces()) * per_surface)
}

/// Resultant of two equal tensions wrapping an ideal pulley by `wrap_angle` degrees.
pub fn normal_load_from_tension(tension: f64, wrap_angle: f64) -> Result<f64> {
    let tension = non_negative("tension", tension)?;
    if !(0.0..=180.0).contains(&wrap_angle) {
        return Err(Error::OutOfRange {
            name: "wrap_angle",
            value: wrap_angle,
            range: "[0, 180] deg",
        });
    }
    Ok(2.0 * tension * (wrap_angle.to_radians() / 2.0).sin())
}

/// Contact radii of the concentric walls, outermost first.
pub fn layer_radii(params: &RadialParams) -> Result<Vec<f64>> {
    positive("outer_radius", params.outer_radius)?;
    if params.layer_count == 0 {
        return Err(Error::InvalidParams("layer_count must be at least 1".into()));
    }
    let radii: Vec<f64> = (0..params.layer_count)
        .map(|i| params.radius_of_layer(i))
        .collect();
    match radii.last() {
        Some(&r) if r > 0.0 => Ok(radii),
        Some(&r) => Err(Error::InvalidParams(format!(
            "innermost layer radius would be {r} m"
        ))),
        None => unreachable!(),
    }
}

pub fn radial_holding_torque(params: &RadialParams, tension: f64) -> Result<f64> {
    params.validate()?;
    let tension = non_negative("tension", tension)?;
    let sum: f64 = layer_radii(params)?.iter().sum();
    Ok(params.material.mu * sum * tension)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn bead(mu: f64, r: f64) -> BeadParams {
        BeadParams {
            contact_radius: r,
            cone_apex_angle: 70.0,
            material: Material { mu },
        }
    }

    fn comb(a: u32, mu: f64, r: f64) -> CombParams {
        CombParams {
            plate_radius: r,
            plate_count: a,
            plate_thickness: 0.0011,
            clearance: 0.00112,
            training_angle: 45.0,
            material: Material { mu },
        }
    }

    fn radial(n: u32, mu: f64, r: f64) -> RadialParams {
        RadialParams {
            outer_radius: r,
            layer_count: n,
            wall_thickness: 0.0009,
            clearance: 0.00105,
            material: Material { mu },
        }
    }

    #[test]
    fn bead_examples() {
        assert_eq!(bead_holding_torque(&bead(1.0, 1.0), 1.0).unwrap(), 1.0);
        assert_eq!(bead_holding_torque(&bead(0.4, 0.006), 0.0).unwrap(), 0.0);
        // 0.13 / (50 * 0.006) inverted by hand.
        let mu = 0.13 / (50.0 * 0.006);
        assert_relative_eq!(
            bead_holding_torque(&bead(mu, 0.006), 50.0).unwrap(),
            0.13,
            max_relative = 1e-12
        );
        let rounded = bead_holding_torque(&bead(0.433, 0.006), 50.0).unwrap();
        assert!((rounded - 0.13).abs() < 1e-3, "{rounded}");
    }

    #[test]
    fn bead_rejects_negative_tension() {
        assert!(matches!(
            bead_holding_torque(&bead(0.4, 0.006), -1.0),
            Err(Error::Negative { name: "tension", .. })
        ));
    }

    #[test]
    fn disc_examples() {
        assert_eq!(disc_friction_torque(0.0, 10.0, 0.01).unwrap(), 0.0);
        assert_relative_eq!(disc_friction_torque(1.0, 1.0, 1.0).unwrap(), 2.0 / 3.0);
        assert_relative_eq!(
            disc_friction_torque(0.3, 70.71, 0.015).unwrap(),
            0.21213,
            max_relative = 1e-12
        );
        assert!(disc_friction_torque(-0.1, 1.0, 1.0).is_err());
        assert!(disc_friction_torque(0.1, -1.0, 1.0).is_err());
    }

    #[test]
    fn numeric_disc_errors_and_zero_load() {
        assert!(disc_friction_torque_numeric(1.0, 1.0, 1.0, 0, 10).is_err());
        assert!(disc_friction_torque_numeric(1.0, 1.0, 1.0, 10, 0).is_err());
        assert_eq!(disc_friction_torque_numeric(0.5, 0.0, 1.0, 10, 10).unwrap(), 0.0);
    }

    #[test]
    fn numeric_disc_sequential_matches_parallel() {
        let a = disc_friction_torque_numeric_with(Execution::Sequential, 0.3, 70.71, 0.015, 300, 200)
            .unwrap();
        let b = disc_friction_torque_numeric_with(Execution::Parallel, 0.3, 70.71, 0.015, 300, 200)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn comb_surface_count_and_reduction() {
        assert_eq!(comb(5, 0.3, 0.015).contact_surfaces(), 9);
        assert_eq!(
            comb_holding_torque(&comb(1, 1.0, 1.0), 1.0).unwrap(),
            disc_friction_torque(1.0, 1.0, 1.0).unwrap()
        );
        assert_relative_eq!(
            comb_holding_torque(&comb(5, 0.3, 0.015), 70.71).unwrap(),
            9.0 * 0.21213,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pulley_examples() {
        assert_eq!(normal_load_from_tension(50.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(normal_load_from_tension(50.0, 180.0).unwrap(), 100.0);
        assert_relative_eq!(
            normal_load_from_tension(50.0, 90.0).unwrap(),
            50.0 * 2f64.sqrt(),
            max_relative = 1e-12
        );
        assert!(normal_load_from_tension(50.0, 181.0).is_err());
        assert!(normal_load_from_tension(50.0, -1.0).is_err());
    }

    #[test]
    fn layer_radii_examples() {
        let r = layer_radii(&radial(3, 0.5, 0.0075)).unwrap();
        let expected = [0.0075, 0.00555, 0.0036];
        for (got, want) in r.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert_eq!(layer_radii(&radial(1, 0.5, 0.0075)).unwrap(), vec![0.0075]);
        assert!(layer_radii(&radial(3, 0.5, 0.002)).is_err());
    }

    #[test]
    fn radial_examples() {
        let single = radial(1, 0.4, 0.0075);
        assert_eq!(
            radial_holding_torque(&single, 50.0).unwrap(),
            bead_holding_torque(&bead(0.4, 0.0075), 50.0).unwrap()
        );
        let mu = 0.39 / (50.0 * 0.01665);
        assert_relative_eq!(
            radial_holding_torque(&radial(3, mu, 0.0075), 50.0).unwrap(),
            0.39,
            max_relative = 1e-12
        );
        // Rounded coefficient quoted for the prototype geometry.
        let t = radial_holding_torque(&radial(3, 0.473, 0.0075), 50.0).unwrap();
        assert!((t - 0.39).abs() / 0.39 < 0.01, "{t}");
        assert_eq!(radial_holding_torque(&radial(3, mu, 0.0075), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn family_round_trips_through_str() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("gear".parse::<Family>().is_err());
    }

    #[test]
    fn gain_matches_torque() {
        let mechs = [
            MechanismParams::Bead(bead(0.4, 0.006)),
            MechanismParams::Comb(comb(5, 0.1, 0.006)),
            MechanismParams::Radial(radial(3, 0.5, 0.0075)),
        ];
        for m in mechs {
            let mu = m.material().mu;
            assert_relative_eq!(
                m.holding_torque(37.0).unwrap(),
                mu * m.torque_gain().unwrap() * 37.0,
                max_relative = 1e-12
            );
        }
    }
}
