//! Grid sweeps over mechanism parameters, Pareto filtering and preset
//! recommendation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{calibrated_preset, MechanismConfig};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::tension::{tip_torque_profile, AttenuationModel, TorqueProfile};
use crate::torque::{Family, Material, MechanismParams};

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Sweepable parameters, in grid order (the last one varies fastest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Bead contact radius, comb plate radius, or radial outer radius (m).
    Radius,
    /// Plate or layer count.
    Count,
    Thickness,
    Clearance,
    Mu,
    /// Tension retention per joint.
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ParamRange {
    pub fn fixed(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            steps: 1,
        }
    }

    fn values(&self, param: SweepParam) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(Error::InvalidParams(format!("{param:?}: steps must be at least 1")));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidParams(format!(
                "{param:?}: need finite min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.steps == 1 {
            return Ok(vec![self.min]);
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        let values: Vec<f64> = (0..self.steps)
            .map(|i| self.min + span * (i as f64 / last))
            .collect();
        if param == SweepParam::Count && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(Error::InvalidParams(format!(
                "count range [{}, {}] in {} steps does not land on positive integers",
                self.min, self.max, self.steps
            )));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mechanism: Family,
    #[serde(default)]
    pub ranges: BTreeMap<SweepParam, ParamRange>,
    pub joint_count: usize,
    #[serde(rename = "root_tension_N")]
    pub root_tension: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_GRID_CAP
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("sweep spec: {e}")))
    }

    fn axes(&self) -> Result<Vec<(SweepParam, Vec<f64>)>> {
        self.ranges
            .iter()
            .map(|(&p, r)| {
                if self.mechanism == Family::Bead
                    && matches!(p, SweepParam::Count | SweepParam::Thickness | SweepParam::Clearance)
                {
                    return Err(Error::InvalidParams(format!(
                        "{p:?} cannot be swept for bead"
                    )));
                }
                Ok((p, r.values(p)?))
            })
            .collect()
    }

    pub fn grid_size(&self) -> Result<u128> {
        Ok(self
            .axes()?
            .iter()
            .map(|(_, v)| v.len() as u128)
            .product())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub index: usize,
    pub mechanism: Family,
    #[serde(rename = "radius_m")]
    pub radius: f64,
    pub count: Option<u32>,
    #[serde(rename = "thickness_m")]
    pub thickness: Option<f64>,
    #[serde(rename = "clearance_m")]
    pub clearance: Option<f64>,
    pub mu: f64,
    pub k: f64,
    pub feasible: bool,
    #[serde(rename = "tip_torque_Nm")]
    pub tip_torque: f64,
    #[serde(rename = "root_torque_Nm")]
    pub root_torque: f64,
    #[serde(rename = "width_m")]
    pub width: f64,
    #[serde(rename = "weight_proxy_mm2")]
    pub weight_proxy: f64,
    pub note: String,
}

impl DesignRecord {
    pub fn part_count(&self) -> u32 {
        self.count.unwrap_or(1)
    }
}

fn apply(params: &mut MechanismParams, attenuation: &mut AttenuationModel, param: SweepParam, v: f64) {
    match param {
        SweepParam::Mu => *params = params.with_material(Material { mu: v }),
        SweepParam::K => attenuation.retention_per_joint = v,
        _ => match params {
            MechanismParams::Bead(p) => {
                if param == SweepParam::Radius {
                    p.contact_radius = v;
                }
            }
            MechanismParams::Comb(p) => match param {
                SweepParam::Radius => p.plate_radius = v,
                SweepParam::Count => p.plate_count = v as u32,
                SweepParam::Thickness => p.plate_thickness = v,
                SweepParam::Clearance => p.clearance = v,
                _ => {}
            },
            MechanismParams::Radial(p) => match param {
                SweepParam::Radius => p.outer_radius = v,
                SweepParam::Count => p.layer_count = v as u32,
                SweepParam::Thickness => p.wall_thickness = v,
                SweepParam::Clearance => p.clearance = v,
                _ => {}
            },
        },
    }
}

fn describe(index: usize, params: &MechanismParams, k: f64) -> DesignRecord {
    let (count, thickness, clearance) = match params {
        MechanismParams::Bead(_) => (None, None, None),
        MechanismParams::Comb(p) => (Some(p.plate_count), Some(p.plate_thickness), Some(p.clearance)),
        MechanismParams::Radial(p) => (Some(p.layer_count), Some(p.wall_thickness), Some(p.clearance)),
    };
    DesignRecord {
        index,
        mechanism: params.family(),
        radius: params.radius(),
        count,
        thickness,
        clearance,
        mu: params.material().mu,
        k,
        feasible: false,
        tip_torque: 0.0,
        root_torque: 0.0,
        width: params.width(),
        weight_proxy: 0.0,
        note: String::new(),
    }
}

/// Evaluates one design: tip and root torque of its chain, width, weight proxy.
pub fn evaluate_design(
    index: usize,
    base: &MechanismConfig,
    joint_count: usize,
    root_tension: f64,
) -> DesignRecord {
    let mech = &base.mechanism;
    let mut record = describe(index, &mech.params, mech.attenuation.retention_per_joint);
    let outcome = base
        .chain(joint_count, root_tension)
        .and_then(|chain| tip_torque_profile(mech, &chain))
        .and_then(|profile| Ok((profile, mech.params.weight_proxy()?)));
    match outcome {
        Ok((profile, area)) => {
            record.feasible = true;
            record.root_torque = profile.root_torque();
            record.tip_torque = profile.tip_torque();
            record.weight_proxy = area * 1e6;
        }
        Err(e) => record.note = e.to_string(),
    }
    record
}

/// Evaluates the sweep starting from the family's calibrated preset.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<DesignRecord>> {
    let base = calibrated_preset(spec.mechanism)?;
    run_sweep_with(Execution::default(), spec, &base)
}

pub fn run_sweep_with(exec: Execution, spec: &SweepSpec, base: &MechanismConfig) -> Result<Vec<DesignRecord>> {
    if base.mechanism.family() != spec.mechanism {
        return Err(Error::InvalidParams(format!(
            "sweep is over {} but the base config is {}",
            spec.mechanism,
            base.mechanism.family()
        )));
    }
    if spec.joint_count == 0 {
        return Err(Error::InvalidParams("joint_count must be at least 1".into()));
    }
    let axes = spec.axes()?;
    let total: u128 = axes.iter().map(|(_, v)| v.len() as u128).product();
    if total > spec.cap as u128 {
        return Err(Error::GridTooLarge {
            points: total,
            cap: spec.cap,
        });
    }
    let total = total as usize;

    Ok(par::map_indexed(exec, total, |index| {
        let mut config = *base;
        let mut rest = index;
        for (param, values) in axes.iter().rev() {
            let v = values[rest % values.len()];
            rest /= values.len();
            apply(
                &mut config.mechanism.params,
                &mut config.mechanism.attenuation,
                *param,
                v,
            );
        }
        evaluate_design(index, &config, spec.joint_count, spec.root_tension)
    }))
}

pub fn write_records_csv<W: Write>(records: &[DesignRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<DesignRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    TipTorque,
    RootTorque,
    Width,
    WeightProxy,
    PartCount,
}

impl Objective {
    pub fn value(self, r: &DesignRecord) -> f64 {
        match self {
            Objective::TipTorque => r.tip_torque,
            Objective::RootTorque => r.root_torque,
            Objective::Width => r.width,
            Objective::WeightProxy => r.weight_proxy,
            Objective::PartCount => f64::from(r.part_count()),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tip_torque_Nm" => Objective::TipTorque,
            "root_torque_Nm" => Objective::RootTorque,
            "width_m" => Objective::Width,
            "weight_proxy_mm2" => Objective::WeightProxy,
            "count" | "part_count" => Objective::PartCount,
            other => return Err(Error::UnknownField(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Minimize => "min",
            Direction::Maximize => "max",
        })
    }
}

/// Parses `field:dir,field:dir`, e.g. `tip_torque_Nm:max,width_m:min`.
pub fn parse_objectives(spec: &str) -> Result<Vec<(Objective, Direction)>> {
    let objectives = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (field, dir) = item.trim().split_once(':').ok_or_else(|| {
                Error::InvalidParams(format!("objective `{item}` must look like field:min or field:max"))
            })?;
            let dir = match dir.trim() {
                "min" => Direction::Minimize,
                "max" => Direction::Maximize,
                other => {
                    return Err(Error::InvalidParams(format!("direction `{other}` is not min or max")))
                }
            };
            Ok((field.trim().parse()?, dir))
        })
        .collect::<Result<Vec<_>>>()?;
    if objectives.is_empty() {
        return Err(Error::InvalidParams("at least one objective is required".into()));
    }
    Ok(objectives)
}

fn dominates(a: &DesignRecord, b: &DesignRecord, objectives: &[(Objective, Direction)]) -> bool {
    let mut strictly = false;
    for &(obj, dir) in objectives {
        let (va, vb) = (obj.value(a), obj.value(b));
        let ord = match dir {
            Direction::Maximize => va.partial_cmp(&vb),
            Direction::Minimize => vb.partial_cmp(&va),
        };
        match ord {
            Some(Ordering::Less) | None => return false,
            Some(Ordering::Greater) => strictly = true,
            Some(Ordering::Equal) => {}
        }
    }
    strictly
}

/// Non-dominated feasible records, in input order.
pub fn pareto_front(records: &[DesignRecord], objectives: &[(Objective, Direction)]) -> Result<Vec<DesignRecord>> {
    pareto_front_with(Execution::default(), records, objectives)
}

pub fn pareto_front_with(
    exec: Execution,
    records: &[DesignRecord],
    objectives: &[(Objective, Direction)],
) -> Result<Vec<DesignRecord>> {
    if objectives.is_empty() {
        return Err(Error::InvalidParams("at least one objective is required".into()));
    }
    let feasible: Vec<&DesignRecord> = records.iter().filter(|r| r.feasible).collect();
    let keep = par::map_indexed(exec, feasible.len(), |i| {
        !feasible.iter().any(|other| dominates(other, feasible[i], objectives))
    });
    Ok(feasible
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    #[serde(rename = "min_tip_torque_Nm")]
    pub min_tip_torque: f64,
    #[serde(rename = "max_width_m")]
    pub max_width: f64,
    pub joint_count: usize,
    #[serde(rename = "max_tension_N")]
    pub max_tension: f64,
}

impl Requirement {
    pub fn validate(&self) -> Result<()> {
        let ok = self.min_tip_torque > 0.0
            && self.max_width > 0.0
            && self.joint_count > 0
            && self.max_tension > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams("requirement fields must all be positive".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedDesign {
    pub mechanism: Family,
    pub params: MechanismParams,
    #[serde(rename = "tip_torque_Nm")]
    pub tip_torque: f64,
    #[serde(rename = "margin_Nm")]
    pub margin: f64,
    #[serde(rename = "width_m")]
    pub width: f64,
    pub part_count: u32,
    pub profile: TorqueProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedDesign {
    pub mechanism: Family,
    #[serde(rename = "tip_torque_Nm")]
    pub tip_torque: f64,
    #[serde(rename = "width_m")]
    pub width: f64,
    pub binding_constraints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub requirement: Requirement,
    pub ranked: Vec<RankedDesign>,
    pub rejected: Vec<RejectedDesign>,
}

/// Ranks candidates that satisfy `req` by tip-torque margin, then width,
/// then part count. Candidates are evaluated at the full allowed tension.
pub fn recommend(req: &Requirement, candidates: &[MechanismConfig]) -> Result<Recommendation> {
    req.validate()?;
    let mut ranked = Vec::new();
    let mut rejected = Vec::new();
    for cand in candidates {
        let chain = cand.chain(req.joint_count, req.max_tension)?;
        let profile = tip_torque_profile(&cand.mechanism, &chain)?;
        let params = cand.mechanism.params;
        let tip_torque = profile.tip_torque();
        let width = params.width();

        let mut binding = Vec::new();
        if tip_torque < req.min_tip_torque {
            binding.push(format!(
                "tip torque {tip_torque:.4} N·m at joint {} is below {} N·m",
                req.joint_count, req.min_tip_torque
            ));
        }
        if width > req.max_width {
            binding.push(format!("width {width} m exceeds {} m", req.max_width));
        }
        if binding.is_empty() {
            ranked.push(RankedDesign {
                mechanism: params.family(),
                params,
                tip_torque,
                margin: tip_torque - req.min_tip_torque,
                width,
                part_count: params.part_count(),
                profile,
            });
        } else {
            rejected.push(RejectedDesign {
                mechanism: params.family(),
                tip_torque,
                width,
                binding_constraints: binding,
            });
        }
    }
    ranked.sort_by(|a, b| {
        b.tip_torque
            .total_cmp(&a.tip_torque)
            .then(a.width.total_cmp(&b.width))
            .then(a.part_count.cmp(&b.part_count))
    });
    Ok(Recommendation {
        requirement: *req,
        ranked,
        rejected,
    })
}

/// The three calibrated presets.
pub fn default_candidates() -> Result<Vec<MechanismConfig>> {
    Family::ALL.into_iter().map(calibrated_preset).collect()
}
