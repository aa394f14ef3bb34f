//! Run configuration: defaults, a flat `key = value` file, then command-line
//! overrides.

use std::path::{Path, PathBuf};

use super::WorkbenchError;
use crate::builders::{PolytopeKind, DEFAULT_VERTEX_CAP};
use crate::quantum::MeasurementAngles;
use crate::scenario::Scenario;

pub const DEFAULT_RESOLUTION: usize = 201;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub model: PolytopeKind,
    pub angles: MeasurementAngles,
    pub mus: Vec<f64>,
    pub inequality: String,
    pub dims: (usize, usize),
    /// `None` picks the default for the local dimension.
    pub restarts: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub vertex_cap: usize,
    pub resolution: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario { settings: 3, outcomes: 2 },
            model: PolytopeKind::Lf,
            angles: MeasurementAngles::experiment(),
            mus: (0..=100).map(|k| k as f64 / 100.0).collect(),
            inequality: crate::scenario::library::GENUINE_LF_1.to_string(),
            dims: (2, 2),
            restarts: None,
            seed: DEFAULT_SEED,
            threads: None,
            out: PathBuf::from("out"),
            vertex_cap: DEFAULT_VERTEX_CAP,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

fn invalid(key: &str, value: &str, why: impl std::fmt::Display) -> WorkbenchError {
    WorkbenchError::Validation(format!("{key} = {value:?}: {why}"))
}

fn numbers<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, WorkbenchError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|e| invalid(key, value, e)))
        .collect()
}

fn pair(key: &str, value: &str) -> Result<(usize, usize), WorkbenchError> {
    match numbers::<usize>(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(invalid(key, value, "expected two comma-separated integers")),
    }
}

pub fn parse_scenario(value: &str) -> Result<Scenario, WorkbenchError> {
    let (n, o) = pair("scenario", value)?;
    Scenario::new(n, o).map_err(|e| invalid("scenario", value, e))
}

/// `φ1,…,φN,β` in degrees.
pub fn parse_angles(value: &str) -> Result<MeasurementAngles, WorkbenchError> {
    let mut v = numbers::<f64>("angles", value)?;
    if v.len() < 3 || v.iter().any(|x| !x.is_finite()) {
        return Err(invalid("angles", value, "expected finite phi_1,...,phi_N,beta with N >= 2"));
    }
    let beta = v.pop().unwrap();
    Ok(MeasurementAngles::new(v, beta))
}

pub fn parse_mus(value: &str) -> Result<Vec<f64>, WorkbenchError> {
    let v = numbers::<f64>("mu", value)?;
    if v.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(invalid("mu", value, "every mu must lie in [0, 1]"));
    }
    Ok(v)
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), WorkbenchError> {
        let value = value.trim();
        match key.trim() {
            "scenario" => self.scenario = parse_scenario(value)?,
            "model" => self.model = value.parse().map_err(|e: String| invalid(key, value, e))?,
            "angles" => self.angles = parse_angles(value)?,
            "mu" => self.mus = parse_mus(value)?,
            "ineq" | "inequality" => self.inequality = value.to_string(),
            "dims" => self.dims = pair(key, value)?,
            "restarts" => self.restarts = Some(value.parse().map_err(|e| invalid(key, value, e))?),
            "seed" => self.seed = value.parse().map_err(|e| invalid(key, value, e))?,
            "threads" => self.threads = Some(value.parse().map_err(|e| invalid(key, value, e))?),
            "out" => self.out = PathBuf::from(value),
            "vertex_cap" => self.vertex_cap = value.parse().map_err(|e| invalid(key, value, e))?,
            "resolution" => self.resolution = value.parse().map_err(|e| invalid(key, value, e))?,
            other => return Err(WorkbenchError::Validation(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn parse_file_text(&mut self, text: &str) -> Result<(), WorkbenchError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| WorkbenchError::Validation(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), WorkbenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WorkbenchError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        self.parse_file_text(&text)
    }

    /// Checks the values against the preconditions of the modules.
    pub fn validate(&self) -> Result<(), WorkbenchError> {
        if self.dims.0 < 2 || self.dims.1 < 2 || self.dims.0 > 4 || self.dims.1 > 4 {
            return Err(WorkbenchError::Validation(format!("dims {:?}: local dimensions must lie in 2..=4", self.dims)));
        }
        if self.restarts == Some(0) {
            return Err(WorkbenchError::Validation("restarts must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(WorkbenchError::Validation("threads must be at least 1".into()));
        }
        if self.resolution < 2 {
            return Err(WorkbenchError::Validation("resolution must be at least 2".into()));
        }
        if self.vertex_cap == 0 {
            return Err(WorkbenchError::Validation("vertex_cap must be positive".into()));
        }
        if self.mus.is_empty() {
            return Err(WorkbenchError::Validation("empty mu list".into()));
        }
        Ok(())
    }

    pub fn restarts_or_default(&self) -> usize {
        self.restarts.unwrap_or_else(|| crate::quantum::default_restarts(self.dims.0.max(self.dims.1)))
    }
}
