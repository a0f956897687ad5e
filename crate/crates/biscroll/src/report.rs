//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

/// One verified quantity: what was checked, what was expected, what came out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// Human-readable statement of the quantity being verified.
    pub detail: String,
    pub expected: serde_json::Value,
    pub observed: serde_json::Value,
    /// Comparison tolerance; `null` means exact equality.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl CheckRecord {
    pub fn exact_i64(name: &str, detail: &str, expected: i64, observed: i64) -> Self {
        Self {
            name: name.to_string(),
            detail: detail.to_string(),
            expected: expected.into(),
            observed: observed.into(),
            tolerance: None,
            pass: expected == observed,
        }
    }

    pub fn exact_bool(name: &str, detail: &str, expected: bool, observed: bool) -> Self {
        Self {
            name: name.to_string(),
            detail: detail.to_string(),
            expected: expected.into(),
            observed: observed.into(),
            tolerance: None,
            pass: expected == observed,
        }
    }

    pub fn residual(name: &str, detail: &str, tolerance: f64, observed: f64) -> Self {
        Self {
            name: name.to_string(),
            detail: detail.to_string(),
            expected: format!("< {tolerance:e}").into(),
            observed: observed.into(),
            tolerance: Some(tolerance),
            pass: observed < tolerance,
        }
    }
}

/// Full result of one CLI command run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub wall_time_ms: u64,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            command: command.to_string(),
            config,
            checks,
            wall_time_ms: 0,
            pass,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
