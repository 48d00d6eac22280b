use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One rejected row from a measurement file.
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("joint {joint}: angle {angle_deg} deg exceeds the range of motion ±{limit_deg} deg")]
    AngleOutOfRange {
        joint: usize,
        angle_deg: f64,
        limit_deg: f64,
    },

    #[error("expected {expected} joint angles, got {got}")]
    AngleCount { expected: usize, got: usize },

    #[error("retention factor k = 1 never halves the tension")]
    NoHalving,

    #[error("degenerate fit: need at least two distinct tension values")]
    DegenerateFit,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("measurement ingestion failed:\n{}", format_lines(.0))]
    Ingest(Vec<LineError>),

    #[error("config error: {0}")]
    Config(String),

    #[error("sweep grid has {points} points, above the cap of {cap}; raise the cap to at least {points}")]
    GridTooLarge { points: u128, cap: usize },

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_lines(lines: &[LineError]) -> String {
    lines
        .iter()
        .map(|l| format!("  {l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Negative { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "(0, inf)",
        })
    }
}
