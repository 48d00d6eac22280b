//! Measurement ingestion, affine torque-vs-tension fits, friction
//! calibration, and simulation of the joint-count and tension-sweep
//! experiments.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, Error, LineError, Result};
use crate::mechanism::Mechanism;
use crate::par::{self, Execution};
use crate::tension::{joint_tension, tip_torque_profile, ChainConfig, TorqueProfile};
use crate::torque::{Family, Material, MechanismParams};

/// Joint at which the reference torques were reported.
pub const ANCHOR_JOINT: usize = 4;

/// Reference holding torques (N·m) at [`ANCHOR_JOINT`] under 50 N root tension.
pub fn anchor_torque(family: Family) -> f64 {
    match family {
        Family::Bead => 0.13,
        Family::Comb => 0.20,
        Family::Radial => 0.39,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub mechanism: Option<Family>,
    pub joint_index: usize,
    pub tension: f64,
    pub torque: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub records: Vec<MeasurementRecord>,
    pub lever_arm: f64,
    /// Total push stroke (m).
    pub push_distance: f64,
    /// Push speed (mm/min).
    pub push_velocity: f64,
}

impl MeasurementSet {
    /// Records for one family; untagged records match any family.
    pub fn points_for(&self, family: Family) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.mechanism.is_none_or(|m| m == family))
            .map(|r| (r.tension, r.torque))
            .collect()
    }
}

enum TensionColumn {
    Newton(usize),
    KilogramForce(usize),
}

enum TorqueColumn {
    NewtonMetre(usize),
    NewtonMillimetre(usize),
    /// Peak push force at the lever arm.
    Force(usize),
}

const KGF: f64 = 9.80665;

/// Parses a measurement CSV.
///
/// Leading `# key=value` comment lines set `lever_arm_m`,
/// `push_distance_mm` and `push_velocity_mm_per_min`. Required columns are
/// one of `tension_N`/`tension_kgf` and one of
/// `torque_Nm`/`torque_Nmm`/`force_N`; `mechanism` and `joint_index`
/// (default 1) are optional. Every bad row is reported, not just the first.
pub fn load_measurements<R: Read>(mut source: R) -> Result<MeasurementSet> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut set = MeasurementSet {
        records: Vec::new(),
        lever_arm: ChainConfig::DEFAULT_LEVER_ARM,
        push_distance: 0.015,
        push_velocity: 10.0,
    };
    let mut errors = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once('=') else {
            continue;
        };
        let line_no = i as u64 + 1;
        let parsed = match value.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => v,
            _ => {
                errors.push(LineError {
                    line: line_no,
                    message: format!("metadata `{}` must be a positive number", key.trim()),
                });
                continue;
            }
        };
        match key.trim() {
            "lever_arm_m" => set.lever_arm = parsed,
            "push_distance_mm" => set.push_distance = parsed / 1000.0,
            "push_velocity_mm_per_min" => set.push_velocity = parsed,
            _ => {}
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let header_line = reader.position().line().max(1);

    let tension_col = match (index.get("tension_N"), index.get("tension_kgf")) {
        (Some(&i), _) => Some(TensionColumn::Newton(i)),
        (None, Some(&i)) => Some(TensionColumn::KilogramForce(i)),
        _ => None,
    };
    let torque_col = match (
        index.get("torque_Nm"),
        index.get("torque_Nmm"),
        index.get("force_N"),
    ) {
        (Some(&i), _, _) => Some(TorqueColumn::NewtonMetre(i)),
        (None, Some(&i), _) => Some(TorqueColumn::NewtonMillimetre(i)),
        (None, None, Some(&i)) => Some(TorqueColumn::Force(i)),
        _ => None,
    };
    let (Some(tension_col), Some(torque_col)) = (tension_col, torque_col) else {
        let mut missing = Vec::new();
        if !index.contains_key("tension_N") && !index.contains_key("tension_kgf") {
            missing.push("tension_N (or tension_kgf)");
        }
        if !["torque_Nm", "torque_Nmm", "force_N"]
            .iter()
            .any(|c| index.contains_key(c))
        {
            missing.push("torque_Nm (or torque_Nmm, force_N)");
        }
        errors.push(LineError {
            line: header_line,
            message: format!("missing column(s): {}", missing.join(", ")),
        });
        return Err(Error::Ingest(errors));
    };
    let mechanism_col = index.get("mechanism").copied();
    let joint_col = index.get("joint_index").copied();

    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(LineError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let mut problems = Vec::new();

        let number = |col: usize, name: &str, problems: &mut Vec<String>| -> Option<f64> {
            let cell = row.get(col).unwrap_or("");
            match cell.parse::<f64>() {
                Ok(v) if !v.is_finite() => {
                    problems.push(format!("{name} `{cell}` is not finite"));
                    None
                }
                Ok(v) if v < 0.0 => {
                    problems.push(format!("{name} `{cell}` is negative"));
                    None
                }
                Ok(v) => Some(v),
                Err(_) => {
                    problems.push(format!("{name} `{cell}` is not a number"));
                    None
                }
            }
        };

        let tension = match tension_col {
            TensionColumn::Newton(c) => number(c, "tension_N", &mut problems),
            TensionColumn::KilogramForce(c) => number(c, "tension_kgf", &mut problems).map(|v| v * KGF),
        };
        let torque = match torque_col {
            TorqueColumn::NewtonMetre(c) => number(c, "torque_Nm", &mut problems),
            TorqueColumn::NewtonMillimetre(c) => number(c, "torque_Nmm", &mut problems).map(|v| v / 1000.0),
            TorqueColumn::Force(c) => number(c, "force_N", &mut problems).map(|v| v * set.lever_arm),
        };
        let mechanism = match mechanism_col.map(|c| row.get(c).unwrap_or("")) {
            None | Some("") => None,
            Some(tag) => match tag.parse::<Family>() {
                Ok(f) => Some(f),
                Err(_) => {
                    problems.push(format!("unknown mechanism `{tag}`"));
                    None
                }
            },
        };
        let joint_index = match joint_col.map(|c| row.get(c).unwrap_or("")) {
            None => 1,
            Some(cell) => match cell.parse::<usize>() {
                Ok(j) if j >= 1 => j,
                _ => {
                    problems.push(format!("joint_index `{cell}` is not a positive integer"));
                    0
                }
            },
        };

        match (tension, torque) {
            (Some(tension), Some(torque)) if problems.is_empty() => set.records.push(MeasurementRecord {
                mechanism,
                joint_index,
                tension,
                torque,
            }),
            _ => errors.push(LineError {
                line,
                message: problems.join("; "),
            }),
        }
    }

    if errors.is_empty() {
        Ok(set)
    } else {
        Err(Error::Ingest(errors))
    }
}

/// Least-squares line `torque = slope * tension + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Tension at which the fitted torque reaches zero, if positive.
    pub engagement_tension: f64,
}

impl AffineFit {
    fn new(slope: f64, intercept: f64, r_squared: f64) -> Self {
        let engagement_tension = if intercept < 0.0 && slope > 0.0 {
            -intercept / slope
        } else {
            0.0
        };
        Self {
            slope,
            intercept,
            r_squared,
            engagement_tension,
        }
    }

    pub fn predict(&self, tension: f64) -> f64 {
        self.slope * tension + self.intercept
    }
}

fn r_squared(points: &[(f64, f64)], slope: f64, intercept: f64) -> f64 {
    let n = points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Ordinary least squares with a free intercept.
pub fn fit_affine(points: &[(f64, f64)]) -> Result<AffineFit> {
    let first = points.first().ok_or(Error::DegenerateFit)?.0;
    if points.iter().all(|p| p.0 == first) {
        return Err(Error::DegenerateFit);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    Ok(AffineFit::new(slope, intercept, r_squared(points, slope, intercept)))
}

/// Least squares constrained through the origin.
pub fn fit_through_origin(points: &[(f64, f64)]) -> Result<AffineFit> {
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    if points.is_empty() || sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = sxy / sxx;
    Ok(AffineFit::new(slope, 0.0, r_squared(points, slope, 0.0)))
}

/// Effective friction coefficient implied by a fitted torque-vs-tension slope.
pub fn calibrate_mu(mech: &MechanismParams, fit: &AffineFit) -> Result<Material> {
    if !fit.slope.is_finite() || fit.slope <= 0.0 {
        return Err(Error::Calibration(format!(
            "slope must be positive, got {}",
            fit.slope
        )));
    }
    Material::new(fit.slope / mech.torque_gain()?)
}

/// Re-fits `mu` so the chain's `joint_index` joint holds exactly `torque`.
pub fn calibrate_to_anchor(
    mech: &Mechanism,
    chain: &ChainConfig,
    joint_index: usize,
    torque: f64,
) -> Result<Mechanism> {
    mech.validate()?;
    chain.validate()?;
    non_negative("torque", torque)?;
    let tension = joint_tension(chain.root_tension, mech.attenuation, joint_index)?;
    let loaded = mech.effective_tension(tension)?;
    if loaded <= 0.0 {
        return Err(Error::Calibration(format!(
            "joint {joint_index} sees no load above the engagement tension"
        )));
    }
    let fit = AffineFit::new(torque / loaded, 0.0, 1.0);
    let material = calibrate_mu(&mech.params, &fit)?;
    Ok(Mechanism {
        params: mech.params.with_material(material),
        ..*mech
    })
}

/// Joint-count experiment: one torque profile per mechanism.
pub fn simulate_experiment_i(mechs: &[Mechanism], chain: &ChainConfig) -> Result<Vec<TorqueProfile>> {
    par::map_indexed(Execution::default(), mechs.len(), |i| {
        tip_torque_profile(&mechs[i], chain)
    })
    .into_iter()
    .collect()
}

/// Tension-sweep experiment: root-joint torque at each grid tension.
pub fn simulate_experiment_ii(mechs: &[Mechanism], tension_grid: &[f64]) -> Result<Vec<Vec<(f64, f64)>>> {
    if tension_grid.is_empty() {
        return Err(Error::InvalidParams("tension grid is empty".into()));
    }
    for &t in tension_grid {
        non_negative("tension", t)?;
    }
    par::map_indexed(Execution::default(), mechs.len(), |i| {
        tension_grid
            .iter()
            .map(|&t| Ok((t, mechs[i].torque_at(t)?)))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tension::AttenuationModel;
    use crate::torque::BeadParams;
    use approx::assert_relative_eq;

    fn bead_params(mu: f64) -> MechanismParams {
        MechanismParams::Bead(BeadParams {
            contact_radius: 0.006,
            cone_apex_angle: 70.0,
            material: Material { mu },
        })
    }

    #[test]
    fn loads_three_rows() {
        let csv = "mechanism,joint_index,tension_N,torque_Nm\n\
                   bead,1,50,0.13\ncomb,4,50,0.20\nradial,4,50,0.39\n";
        let set = load_measurements(csv.as_bytes()).unwrap();
        assert_eq!(set.records.len(), 3);
        assert_eq!(set.records[2].mechanism, Some(Family::Radial));
        assert_eq!(set.records[2].joint_index, 4);
        assert_eq!(set.records[2].torque, 0.39);
        assert_eq!(set.lever_arm, 0.122);
    }

    #[test]
    fn reports_every_bad_line() {
        let csv = "tension_N,torque_Nm\n-5,0.1\n10,abc\n20,0.2\n";
        match load_measurements(csv.as_bytes()) {
            Err(Error::Ingest(lines)) => {
                assert_eq!(lines.iter().map(|l| l.line).collect::<Vec<_>>(), vec![2, 3]);
                assert!(lines[0].message.contains("negative"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_columns_are_named() {
        let err = load_measurements("tension_N,foo\n1,2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("torque_Nm"), "{err}");
    }

    #[test]
    fn unit_conversion_and_metadata() {
        let csv = "# lever_arm_m=0.1\n# push_distance_mm=15\ntension_kgf,force_N\n1,2\n";
        let set = load_measurements(csv.as_bytes()).unwrap();
        assert_eq!(set.lever_arm, 0.1);
        assert_eq!(set.push_distance, 0.015);
        assert_relative_eq!(set.records[0].tension, KGF);
        assert_relative_eq!(set.records[0].torque, 0.2);
        assert_eq!(set.records[0].joint_index, 1);
    }

    #[test]
    fn fit_examples() {
        let line: Vec<_> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let fit = fit_affine(&line).unwrap();
        assert_relative_eq!(fit.slope, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 1.0, max_relative = 1e-12);
        assert_eq!(fit.r_squared, 1.0);
        assert_eq!(fit.engagement_tension, 0.0);

        let flat: Vec<_> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let fit = fit_affine(&flat).unwrap();
        assert_eq!((fit.slope, fit.intercept), (0.0, 0.0));

        assert!(matches!(fit_affine(&[(1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateFit)));
        assert!(matches!(fit_affine(&[]), Err(Error::DegenerateFit)));
    }

    #[test]
    fn engagement_from_negative_intercept() {
        let pts: Vec<_> = (0..5).map(|i| (10.0 + i as f64, 0.01 * (i as f64 + 10.0 - 4.0))).collect();
        let fit = fit_affine(&pts).unwrap();
        assert_relative_eq!(fit.engagement_tension, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn calibrate_examples() {
        let through = |slope| AffineFit::new(slope, 0.0, 1.0);
        let bead = calibrate_mu(&bead_params(0.1), &through(0.13 / 50.0)).unwrap();
        assert_relative_eq!(bead.mu, 0.4333333333333333, max_relative = 1e-12);
        assert!(matches!(
            calibrate_mu(&bead_params(0.1), &through(0.0)),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn anchor_round_trip() {
        let mech = Mechanism::new(bead_params(0.1), AttenuationModel::new(0.985).unwrap());
        let chain = ChainConfig {
            joint_count: 4,
            inter_axial_distance: 0.006,
            lever_arm: 0.122,
            root_tension: 50.0,
        };
        let calibrated = calibrate_to_anchor(&mech, &chain, 4, 0.13).unwrap();
        let profile = tip_torque_profile(&calibrated, &chain).unwrap();
        assert_relative_eq!(profile.torque_at(4).unwrap(), 0.13, max_relative = 1e-12);
    }

    #[test]
    fn experiment_ii_is_homogeneous() {
        let mech = Mechanism::new(bead_params(0.4), AttenuationModel::LOSSLESS);
        let out = simulate_experiment_ii(&[mech], &[0.0, 10.0, 20.0]).unwrap();
        assert_eq!(out[0][0].1, 0.0);
        assert_relative_eq!(out[0][2].1, 2.0 * out[0][1].1, max_relative = 1e-15);
        assert!(simulate_experiment_ii(&[mech], &[]).is_err());
        assert!(simulate_experiment_ii(&[mech], &[-1.0]).is_err());
    }
}
