use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::Result;

/// Acceptance rule attached to a metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tolerance {
    Within { lo: f64, hi: f64 },
    AtMost { bound: f64 },
    AtLeast { bound: f64 },
    /// reported for context, not judged
    Informational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Tolerance {
    pub fn judge(&self, value: f64) -> Verdict {
        let ok = match *self {
            Tolerance::Informational => return Verdict::Info,
            Tolerance::Within { lo, hi } => value >= lo && value <= hi,
            Tolerance::AtMost { bound } => value <= bound,
            Tolerance::AtLeast { bound } => value >= bound,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    /// the value predicted by theory, when there is one
    pub target: Option<f64>,
    pub tolerance: Tolerance,
    pub verdict: Verdict,
}

impl Metric {
    pub fn new(name: &str, value: f64, target: Option<f64>, tolerance: Tolerance) -> Self {
        Self {
            name: name.to_string(),
            value,
            target,
            tolerance,
            verdict: tolerance.judge(value),
        }
    }

    pub fn within(name: &str, value: f64, target: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Some(target), Tolerance::Within { lo, hi })
    }

    pub fn at_most(name: &str, value: f64, target: Option<f64>, bound: f64) -> Self {
        Self::new(name, value, target, Tolerance::AtMost { bound })
    }

    pub fn at_least(name: &str, value: f64, target: Option<f64>, bound: f64) -> Self {
        Self::new(name, value, target, Tolerance::AtLeast { bound })
    }

    pub fn info(name: &str, value: f64) -> Self {
        Self::new(name, value, None, Tolerance::Informational)
    }
}

/// A CSV side table of numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Self {
            file: file.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join(&self.file))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub description: String,
    pub anchor: String,
    pub config: ExperimentConfig,
    pub metrics: Vec<Metric>,
    pub tables: Vec<String>,
    /// wall-clock seconds; omitted from stable output
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
    pub version: String,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn failures(&self) -> Vec<&Metric> {
        self.metrics.iter().filter(|m| m.verdict == Verdict::Fail).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

pub(crate) fn overall(metrics: &[Metric]) -> bool {
    metrics.iter().all(|m| m.verdict != Verdict::Fail)
}
