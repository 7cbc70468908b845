//! Cylindrical time-series datasets and their CSV representation.
//!
//! The on-disk format is a comma-separated file with a mandatory header and
//! one row per time point: `time,direction,linear`. Either value may be the
//! missing token (default `NA`). Directions are radians by default, degrees
//! via an option; the linear column can optionally be natural-log
//! transformed at parse time. Lines starting with `#` are skipped.

use crate::angle::wrap;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// One time point: circular angle and linear value, each possibly missing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub x: Option<f64>,
    pub y: Option<f64>,
}

impl Observation {
    pub fn new(x: Option<f64>, y: Option<f64>) -> Self {
        Observation { x, y }
    }

    pub fn fully_missing(&self) -> bool {
        self.x.is_none() && self.y.is_none()
    }

    pub fn fully_observed(&self) -> bool {
        self.x.is_some() && self.y.is_some()
    }
}

/// Parsing options for [`parse_dataset`].
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Interpret the direction column as degrees and convert to radians.
    pub degrees: bool,
    /// Apply a natural-log transform to the linear column.
    pub log_linear: bool,
    /// Token marking a missing value.
    pub missing_token: String,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            degrees: false,
            log_linear: false,
            missing_token: "NA".to_string(),
        }
    }
}

/// Read a dataset file. The header row is required; time indices must be
/// strictly increasing integers. Errors carry 1-based line numbers.
pub fn parse_dataset(path: &Path, opts: &ParseOptions) -> Result<Vec<Observation>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset_str(&text, opts)
}

/// As [`parse_dataset`], from an in-memory string.
pub fn parse_dataset_str(text: &str, opts: &ParseOptions) -> Result<Vec<Observation>> {
    let mut obs = Vec::new();
    let mut last_time: Option<i64> = None;
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::data(format!(
                    "line {line_no}: header must name 3 columns (time,direction,linear), found {}",
                    cols.len()
                )));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::data(format!(
                "line {line_no}: expected 3 comma-separated fields, found {}",
                fields.len()
            )));
        }
        let time: i64 = fields[0].parse().map_err(|_| {
            Error::data(format!(
                "line {line_no}: time index '{}' is not an integer",
                fields[0]
            ))
        })?;
        if let Some(prev) = last_time {
            if time <= prev {
                return Err(Error::data(format!(
                    "line {line_no}: time index {time} does not increase (previous {prev})"
                )));
            }
        }
        last_time = Some(time);
        let parse_value = |field: &str, what: &str| -> Result<Option<f64>> {
            if field == opts.missing_token {
                return Ok(None);
            }
            let v: f64 = field.parse().map_err(|_| {
                Error::data(format!("line {line_no}: {what} value '{field}' is not numeric"))
            })?;
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "line {line_no}: {what} value '{field}' is not finite"
                )));
            }
            Ok(Some(v))
        };
        let x = parse_value(fields[1], "direction")?
            .map(|v| wrap(if opts.degrees { v.to_radians() } else { v }));
        let y = match parse_value(fields[2], "linear")? {
            Some(v) if opts.log_linear => {
                if v <= 0.0 {
                    return Err(Error::data(format!(
                        "line {line_no}: cannot log-transform non-positive linear value {v}"
                    )));
                }
                Some(v.ln())
            }
            other => other,
        };
        obs.push(Observation { x, y });
    }
    if !header_seen {
        return Err(Error::data("dataset file has no header row"));
    }
    if obs.is_empty() {
        return Err(Error::data("dataset contains no observation rows"));
    }
    Ok(obs)
}

/// Render a dataset to CSV text. Values print in shortest round-trip form,
/// so writing and re-parsing reproduces every float bit-exactly. Angles are
/// always written in radians.
pub fn render_dataset(obs: &[Observation], missing_token: &str) -> String {
    let mut out = String::from("time,direction,linear\n");
    for (i, o) in obs.iter().enumerate() {
        let fmt = |v: Option<f64>| match v {
            Some(v) => v.to_string(),
            None => missing_token.to_string(),
        };
        let _ = writeln!(out, "{},{},{}", i + 1, fmt(o.x), fmt(o.y));
    }
    out
}

/// Write a dataset file (see [`render_dataset`]).
pub fn write_dataset(path: &Path, obs: &[Observation], missing_token: &str) -> Result<()> {
    std::fs::write(path, render_dataset(obs, missing_token))
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))
}
