//! Report-producing drivers for the `chaoscalc` commands.
//!
//! Every driver is a pure function of its [`ExperimentConfig`]: the same
//! config gives a byte-identical serialized [`Report`]. Errors returned as
//! `Err` are configuration problems; failed checks live inside the report.

mod analyze;
mod asymptotic;
mod counterexample;
mod cramer;
mod identities;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};
use crate::par::Execution;

pub use analyze::analyze;
pub use asymptotic::{asymptotic, asymptotic_family};
pub use counterexample::counterexample;
pub use cramer::cramer_demo;
pub use identities::verify_identities;

pub const DEFAULT_SEED: u64 = 20_170_322;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_TRUNCATION: usize = 9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub dimension: usize,
    pub q_max: usize,
    pub truncation: usize,
    /// Overrides keyed by check name; unknown names are rejected per command.
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n_samples: DEFAULT_SAMPLES,
            dimension: 3,
            q_max: crate::DEFAULT_MAX_ORDER,
            truncation: DEFAULT_TRUNCATION,
            tolerances: BTreeMap::new(),
            exec: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.n_samples == 0 {
            bad.push("n_samples must be >= 1".to_string());
        }
        if self.dimension == 0 || self.dimension > crate::DEFAULT_MAX_DIMENSION {
            bad.push(format!(
                "dimension must lie in 1..={}, got {}",
                crate::DEFAULT_MAX_DIMENSION,
                self.dimension
            ));
        }
        if self.q_max == 0 {
            bad.push("q_max must be >= 1".to_string());
        }
        for (name, v) in &self.tolerances {
            if !(*v > 0.0) || !v.is_finite() {
                bad.push(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ChaosError::Precondition(bad))
        }
    }

    /// Merges the overrides into a command's defaults.
    pub(crate) fn tolerances(&self, defaults: &[(&str, f64)]) -> Result<Tolerances> {
        self.validate()?;
        let mut map: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (name, v) in &self.tolerances {
            match map.get_mut(name) {
                Some(slot) => *slot = *v,
                None => {
                    let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                    return Err(ChaosError::InvalidParameter(format!(
                        "unknown tolerance {name}; this command accepts {}",
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(Tolerances(map))
    }
}

pub(crate) struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub(crate) fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured > tolerance`.
    Above,
    /// Recorded only; never fails.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// `None` for informational entries.
    pub tolerance: Option<f64>,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: Some(tolerance),
            comparison: Comparison::AtMost,
            passed: measured <= tolerance,
        }
    }

    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: Some(threshold),
            comparison: Comparison::Above,
            passed: measured > threshold,
        }
    }

    pub fn info(name: impl Into<String>, measured: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: None,
            comparison: Comparison::Info,
            passed: true,
        }
    }
}

/// A named numeric table, exported as CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub tables: BTreeMap<String, Table>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub(crate) fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.into(),
            seed: config.seed,
            config: config.clone(),
            checks: Vec::new(),
            tables: BTreeMap::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub(crate) fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    /// The check list as CSV, preceded by `# key=value` metadata lines.
    pub fn checks_csv(&self) -> String {
        let mut out = format!("# command={}\n# seed={}\n", self.command, self.seed);
        for n in &self.notes {
            out.push_str(&format!("# note={n}\n"));
        }
        out.push_str("name,measured,tolerance,comparison,passed\n");
        for c in &self.checks {
            let cmp = match c.comparison {
                Comparison::AtMost => "at_most",
                Comparison::Above => "above",
                Comparison::Info => "info",
            };
            let tol = c.tolerance.map(|t| format!("{t:?}")).unwrap_or_default();
            out.push_str(&format!("{},{:?},{tol},{cmp},{}\n", c.name, c.measured, c.passed));
        }
        out
    }

    /// One table as CSV with the seed as a leading comment.
    pub fn table_csv(&self, name: &str) -> Option<String> {
        self.tables
            .get(name)
            .map(|t| format!("# command={}\n# seed={}\n# table={name}\n{}", self.command, self.seed, t.to_csv()))
    }
}

/// `|a - b| / max(|b|, 1)`.
pub(crate) fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_tolerance_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.tolerances.insert("nope".into(), 1.0);
        assert!(matches!(cfg.tolerances(&[("a", 1.0)]), Err(ChaosError::InvalidParameter(_))));
        cfg.tolerances.clear();
        cfg.tolerances.insert("a".into(), -1.0);
        assert!(matches!(cfg.tolerances(&[("a", 1.0)]), Err(ChaosError::Precondition(_))));
        cfg.tolerances.insert("a".into(), 0.5);
        assert_eq!(cfg.tolerances(&[("a", 1.0)]).unwrap().get("a"), 0.5);
    }

    #[test]
    fn checks_and_csv() {
        let mut r = Report::new("x", &ExperimentConfig::default());
        r.check(Check::at_most("ok", 0.1, 1.0));
        r.check(Check::info("i", 7.0));
        assert!(r.passed);
        r.check(Check::above("bad", 0.1, 1.0));
        assert!(!r.passed);
        assert_eq!(r.first_failure().unwrap().name, "bad");
        assert!(r.checks_csv().contains("bad,0.1,1.0,above,false"));
        let mut t = Table::new(&["t", "re"]);
        t.push(vec![0.0, 1.0]);
        r.tables.insert("g".into(), t);
        assert_eq!(r.table_csv("g").unwrap().lines().last(), Some("0.0,1.0"));
    }
}
