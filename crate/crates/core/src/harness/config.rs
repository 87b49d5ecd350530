use std::path::{Path, PathBuf};

use crate::fem::Order;

use super::registry::lookup;
use super::HarnessError;

/// Settings of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub domain: String,
    pub order: Order,
    pub solution: String,
    /// Boundary node counts, strictly increasing.
    pub levels: Vec<usize>,
    pub solver_tol: f64,
    pub quad_assembly_degree: usize,
    pub quad_error_degree: usize,
    pub exact_domain: bool,
    pub diagnostics: bool,
    pub output: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            domain: "disk".into(),
            order: Order::Linear,
            solution: "cubic10".into(),
            levels: vec![32, 64, 128, 256],
            solver_tol: 1e-10,
            quad_assembly_degree: 5,
            quad_error_degree: 7,
            exact_domain: false,
            diagnostics: false,
            output: None,
        }
    }
}

fn config_error(key: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, HarnessError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_error(key, format!("expected true or false, got {value:?}"))),
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value.parse().map_err(|_| config_error(key, format!("cannot parse {value:?}")))
}

impl StudyConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "domain" => self.domain = value.to_string(),
            "order" => {
                let k: usize = parse_number(key, value)?;
                self.order = Order::from_degree(k).ok_or_else(|| config_error(key, format!("order {k} is not 1 or 2")))?;
            }
            "solution" => self.solution = value.to_string(),
            "levels" => {
                self.levels = value
                    .split(',')
                    .map(|s| parse_number(key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "solver_tol" => self.solver_tol = parse_number(key, value)?,
            "quad_assembly_degree" => self.quad_assembly_degree = parse_number(key, value)?,
            "quad_error_degree" => self.quad_error_degree = parse_number(key, value)?,
            "exact_domain" => self.exact_domain = parse_bool(key, value)?,
            "diagnostics" => self.diagnostics = parse_bool(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(config_error(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks cross-field invariants.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.domain != "disk" {
            return Err(config_error("domain", format!("unsupported domain {:?}", self.domain)));
        }
        lookup(&self.solution).map_err(|_| config_error("solution", format!("unknown solution {:?}", self.solution)))?;
        if self.levels.is_empty() {
            return Err(config_error("levels", "no levels"));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("levels", "levels not increasing"));
        }
        if self.levels[0] < 8 {
            return Err(config_error("levels", "at least 8 boundary nodes required"));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol.is_finite()) {
            return Err(config_error("solver_tol", "must be positive"));
        }
        let k = self.order.degree();
        if self.quad_assembly_degree < 2 * k + 1 {
            return Err(config_error("quad_assembly_degree", format!("at least {} required for order {k}", 2 * k + 1)));
        }
        if self.quad_error_degree < 7 {
            return Err(config_error("quad_error_degree", "at least 7 required"));
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_str(text: &str) -> Result<StudyConfig, HarnessError> {
    let mut config = StudyConfig::default();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_error(line, "expected key = value"))?;
        config.set(key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<StudyConfig, HarnessError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| HarnessError::Io(e.to_string()))?;
    parse_config_str(&text)
}
