//! Advisory parameter-regime checks. A "≪" condition passes when the ratio of
//! the small to the large quantity is below a configurable threshold.

use std::fmt;

/// Default threshold standing in for "much smaller than".
pub const DEFAULT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Warn,
    Violation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Violation => "VIOLATION",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegimeReport {
    pub conditions: Vec<Condition>,
}

impl RegimeReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// `value < threshold` passes, otherwise warns; a non-finite value is a
    /// hard violation.
    pub fn much_less(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        let status = if !value.is_finite() {
            Status::Violation
        } else if value < threshold {
            Status::Pass
        } else {
            Status::Warn
        };
        self.conditions.push(Condition { name: name.into(), value, threshold, status });
    }

    /// Pass when `value ≤ tolerance`, otherwise `failure`.
    pub fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64, failure: Status) {
        let status = if value.is_finite() && value <= tolerance { Status::Pass } else { failure };
        self.conditions.push(Condition { name: name.into(), value, threshold: tolerance, status });
    }

    pub fn violation(&mut self, name: impl Into<String>) {
        self.conditions.push(Condition { name: name.into(), value: f64::NAN, threshold: f64::NAN, status: Status::Violation });
    }

    pub fn worst(&self) -> Status {
        self.conditions.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| c.status != Status::Pass)
    }

    /// 0 all pass, 1 warnings, 2 hard violation.
    pub fn exit_code(&self) -> i32 {
        match self.worst() {
            Status::Pass => 0,
            Status::Warn => 1,
            Status::Violation => 2,
        }
    }

    pub fn merge(&mut self, other: RegimeReport) {
        self.conditions.extend(other.conditions);
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            if c.value.is_nan() {
                writeln!(f, "[{}] {}", c.status, c.name)?;
            } else {
                writeln!(f, "[{}] {}: {:.4e} (threshold {:.1e})", c.status, c.name, c.value, c.threshold)?;
            }
        }
        Ok(())
    }
}
