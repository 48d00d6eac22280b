//! `jamstring`: command-line front end for the jamming-core models.
//!
//! Exit codes: 0 success, 1 infeasible or empty result, 2 usage or
//! validation error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use jamming_core::config::bundled_preset;
use jamming_core::experiments::{
    calibrate_mu, fit_affine, fit_through_origin, load_measurements, simulate_experiment_i,
    simulate_experiment_ii, AffineFit,
};
use jamming_core::explorer::{
    self, parse_objectives, pareto_front, read_records_csv, recommend, run_sweep_with, Requirement,
    SweepSpec,
};
use jamming_core::geometry::{chain_pose, wire_path_length, JointAngles, WireRoute};
use jamming_core::tension::{crossover_joint, tip_torque_profile};
use jamming_core::{ChainConfig, Execution, Family, MechanismConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "jamstring", version, about = "Holding-torque and design tools for tendon-driven jamming chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-joint holding torque at a given wire tension.
    Torque {
        /// Mechanism config file, or builtin:bead|comb|radial.
        config: String,
        /// Wire tension (N).
        #[arg(long)]
        tension: f64,
    },
    /// Per-joint tension and holding torque along a chain.
    Propagate {
        config: String,
        /// Number of joints in the chain.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        joints: u64,
        /// Root wire tension (N).
        #[arg(long, default_value_t = ChainConfig::DEFAULT_ROOT_TENSION)]
        tension: f64,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain pose and wire route length for a set of joint angles.
    Geometry {
        config: String,
        /// Comma-separated joint angles in degrees, root first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        angles: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Route::Conical)]
        route: Route,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit torque-vs-tension lines to measurements and derive mu.
    Calibrate {
        /// Measurement CSV.
        #[arg(long)]
        data: PathBuf,
        config: String,
        /// Output JSON (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a parameter grid.
    Sweep {
        /// Sweep spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Base design (defaults to the bundled preset of the swept family).
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Non-dominated subset of a sweep CSV.
    Pareto {
        #[arg(long = "in")]
        input: PathBuf,
        /// e.g. tip_torque_Nm:max,width_m:min
        #[arg(long)]
        objectives: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First joint at which mechanism A holds at least as much as B.
    Crossover {
        config_a: String,
        config_b: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        joints: u64,
        #[arg(long, default_value_t = ChainConfig::DEFAULT_ROOT_TENSION)]
        tension: f64,
    },
    /// Rank candidate mechanisms against a requirement (JSON report).
    Recommend {
        #[arg(long = "min-tip-torque")]
        min_tip_torque: f64,
        /// Maximum part width (m).
        #[arg(long = "max-width")]
        max_width: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        joints: u64,
        #[arg(long = "max-tension", default_value_t = ChainConfig::DEFAULT_ROOT_TENSION)]
        max_tension: f64,
        /// Candidate configs (defaults to the three bundled presets).
        #[arg(long = "config")]
        configs: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint-count experiment: torque profile of each mechanism.
    ExperimentI {
        /// Configs to simulate (defaults to the three bundled presets).
        configs: Vec<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 10)]
        joints: u64,
        #[arg(long, default_value_t = ChainConfig::DEFAULT_ROOT_TENSION)]
        tension: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tension-sweep experiment: root-joint torque against tension.
    ExperimentIi {
        configs: Vec<String>,
        /// Comma-separated tensions (N).
        #[arg(long, value_delimiter = ',', default_value = "0,10,20,30,40,50,60,70,80")]
        tensions: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Conical,
    Straight,
}

impl From<Route> for WireRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Conical => WireRoute::ConicalPivot,
            Route::Straight => WireRoute::ThroughHoleStraight,
        }
    }
}

enum Outcome {
    Done,
    Empty,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Empty) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(spec: &str) -> Result<MechanismConfig> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let family: Family = name.parse()?;
        return Ok(bundled_preset(family)?);
    }
    Ok(MechanismConfig::from_path(spec)?)
}

fn load_configs(specs: &[String]) -> Result<Vec<MechanismConfig>> {
    if specs.is_empty() {
        return Family::ALL
            .into_iter()
            .map(|f| bundled_preset(f).map_err(Into::into))
            .collect();
    }
    specs.iter().map(|s| load_config(s)).collect()
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn joints(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| anyhow!("joint count {n} is too large"))
}

#[derive(Serialize)]
struct ProfileRow {
    joint_index: usize,
    #[serde(rename = "tension_N")]
    tension: f64,
    #[serde(rename = "torque_Nm")]
    torque: f64,
}

#[derive(Serialize)]
struct PoseRow {
    joint_index: usize,
    x_m: f64,
    y_m: f64,
    path_length_m: f64,
}

#[derive(Serialize)]
struct MechanismProfileRow {
    mechanism: Family,
    joint_index: usize,
    #[serde(rename = "tension_N")]
    tension: f64,
    #[serde(rename = "torque_Nm")]
    torque: f64,
}

#[derive(Serialize)]
struct TensionRow {
    mechanism: Family,
    #[serde(rename = "tension_N")]
    tension: f64,
    #[serde(rename = "torque_Nm")]
    torque: f64,
}

#[derive(Serialize)]
struct FitReport {
    #[serde(rename = "slope_Nm_per_N")]
    slope: f64,
    #[serde(rename = "intercept_Nm")]
    intercept: f64,
    r_squared: f64,
    #[serde(rename = "engagement_tension_N")]
    engagement_tension: f64,
    mu_effective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration_error: Option<String>,
}

#[derive(Serialize)]
struct CalibrationReport {
    mechanism: Family,
    points: usize,
    lever_arm_m: f64,
    free_intercept: FitReport,
    through_origin: FitReport,
}

fn fit_report(config: &MechanismConfig, fit: &AffineFit) -> FitReport {
    let (mu, err) = match calibrate_mu(&config.mechanism.params, fit) {
        Ok(m) => (Some(m.mu), None),
        Err(e) => (None, Some(e.to_string())),
    };
    FitReport {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        engagement_tension: fit.engagement_tension,
        mu_effective: mu,
        calibration_error: err,
    }
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>, path: Option<&Path>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(output(path)?);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Torque { config, tension } => {
            let config = load_config(&config)?;
            let torque = config.mechanism.torque_at(tension)?;
            println!("torque_Nm={torque}");
        }

        Command::Propagate {
            config,
            joints: n,
            tension,
            out,
        } => {
            let config = load_config(&config)?;
            let chain = config.chain(joints(n)?, tension)?;
            let profile = tip_torque_profile(&config.mechanism, &chain)?;
            write_csv(
                profile.entries.iter().map(|e| ProfileRow {
                    joint_index: e.joint_index,
                    tension: e.tension,
                    torque: e.torque,
                }),
                out.as_deref(),
            )?;
        }

        Command::Geometry {
            config,
            angles,
            route,
            out,
        } => {
            let config = load_config(&config)?;
            let angles = JointAngles(angles);
            let chain = config.chain(angles.len(), ChainConfig::DEFAULT_ROOT_TENSION)?;
            let length = wire_path_length(&chain, &angles, route.into(), config.max_joint_angle())?;
            let pose = chain_pose(&chain, &angles)?;
            write_csv(
                pose.iter().enumerate().map(|(i, p)| PoseRow {
                    joint_index: i + 1,
                    x_m: p.x,
                    y_m: p.y,
                    path_length_m: length,
                }),
                out.as_deref(),
            )?;
        }

        Command::Calibrate { data, config, out } => {
            let config = load_config(&config)?;
            let file = File::open(&data).with_context(|| format!("opening {}", data.display()))?;
            let set = load_measurements(file)?;
            let family = config.mechanism.family();
            let points = set.points_for(family);
            if points.is_empty() {
                bail!("{} has no {family} measurements", data.display());
            }
            let free = fit_affine(&points)?;
            let origin = fit_through_origin(&points)?;
            let report = CalibrationReport {
                mechanism: family,
                points: points.len(),
                lever_arm_m: set.lever_arm,
                free_intercept: fit_report(&config, &free),
                through_origin: fit_report(&config, &origin),
            };
            write_json(&report, out.as_deref())?;
        }

        Command::Sweep {
            spec,
            config,
            out,
            sequential,
        } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec = SweepSpec::from_json(&text)?;
            let base = match config {
                Some(c) => load_config(&c)?,
                None => bundled_preset(spec.mechanism)?,
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let records = run_sweep_with(exec, &spec, &base)?;
            let feasible = records.iter().filter(|r| r.feasible).count();
            explorer::write_records_csv(&records, output(out.as_deref())?)?;
            eprintln!("{} grid points, {feasible} feasible", records.len());
            if feasible == 0 {
                return Ok(Outcome::Empty);
            }
        }

        Command::Pareto {
            input,
            objectives,
            out,
        } => {
            let objectives = parse_objectives(&objectives)?;
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let records = read_records_csv(file)?;
            let front = pareto_front(&records, &objectives)?;
            explorer::write_records_csv(&front, output(out.as_deref())?)?;
            if front.is_empty() {
                return Ok(Outcome::Empty);
            }
        }

        Command::Crossover {
            config_a,
            config_b,
            joints: n,
            tension,
        } => {
            let a = load_config(&config_a)?;
            let b = load_config(&config_b)?;
            // Torque profiles depend only on joint count and root tension.
            let chain = a.chain(joints(n)?, tension)?;
            match crossover_joint(&a.mechanism, &b.mechanism, &chain)? {
                Some(j) => println!("crossover_joint={j}"),
                None => {
                    println!("crossover_joint=none");
                    return Ok(Outcome::Empty);
                }
            }
        }

        Command::Recommend {
            min_tip_torque,
            max_width,
            joints: n,
            max_tension,
            configs,
            out,
        } => {
            let candidates = load_configs(&configs)?;
            let req = Requirement {
                min_tip_torque,
                max_width,
                joint_count: joints(n)?,
                max_tension,
            };
            let rec = recommend(&req, &candidates)?;
            write_json(&rec, out.as_deref())?;
            if rec.ranked.is_empty() {
                return Ok(Outcome::Empty);
            }
        }

        Command::ExperimentI {
            configs,
            joints: n,
            tension,
            out,
        } => {
            let configs = load_configs(&configs)?;
            let mut rows = Vec::new();
            for cfg in &configs {
                let chain = cfg.chain(joints(n)?, tension)?;
                let profile = simulate_experiment_i(&[cfg.mechanism], &chain)?.remove(0);
                rows.extend(profile.entries.iter().map(|e| MechanismProfileRow {
                    mechanism: profile.mechanism,
                    joint_index: e.joint_index,
                    tension: e.tension,
                    torque: e.torque,
                }));
            }
            write_csv(rows, out.as_deref())?;
        }

        Command::ExperimentIi {
            configs,
            tensions,
            out,
        } => {
            let configs = load_configs(&configs)?;
            let mechs: Vec<_> = configs.iter().map(|c| c.mechanism).collect();
            let lines = simulate_experiment_ii(&mechs, &tensions)?;
            let rows = mechs.iter().zip(&lines).flat_map(|(m, line)| {
                line.iter().map(move |&(tension, torque)| TensionRow {
                    mechanism: m.family(),
                    tension,
                    torque,
                })
            });
            write_csv(rows, out.as_deref())?;
        }
    }
    Ok(Outcome::Done)
}
