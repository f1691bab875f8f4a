//! Structured pass/fail reports shared by every checker.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Number of violations kept verbatim per check; the rest are only counted.
pub const KEPT_VIOLATIONS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub witness: Vec<String>,
    pub detail: String,
}

/// The outcome of one relation or axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub mode: Mode,
    pub instances: u64,
    /// Instances that could not be formed because of the grade truncation.
    pub skipped: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(id: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            mode: Mode::Exhaustive,
            instances: 0,
            skipped: 0,
            violation_count: 0,
            violations: Vec::new(),
            note: None,
        }
    }

    pub fn sampled(mut self, sampled: bool) -> Self {
        if sampled {
            self.mode = Mode::Sampled;
        }
        self
    }

    pub fn pass(&mut self) {
        self.instances += 1;
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn fail(&mut self, witness: Vec<String>, detail: impl Into<String>) {
        self.instances += 1;
        self.violation_count += 1;
        if self.violations.len() < KEPT_VIOLATIONS {
            self.violations.push(Violation {
                witness,
                detail: detail.into(),
            });
        }
    }

    /// Records a pass when `ok`, otherwise a violation built lazily.
    pub fn expect(&mut self, ok: bool, violation: impl FnOnce() -> (Vec<String>, String)) {
        if ok {
            self.pass();
        } else {
            let (w, d) = violation();
            self.fail(w, d);
        }
    }

    pub fn status(&self) -> Status {
        if self.violation_count > 0 {
            Status::Fail
        } else if self.instances == 0 && self.skipped > 0 {
            Status::Skipped
        } else {
            Status::Pass
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status() != Status::Fail)
    }

    pub fn violation_count(&self) -> u64 {
        self.checks.iter().map(|c| c.violation_count).sum()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status() == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let status = match c.status() {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let mode = match c.mode {
                Mode::Exhaustive => "exhaustive",
                Mode::Sampled => "sampled",
            };
            write!(
                f,
                "  {:<7} {:<40} {:>9} instances, {} skipped at boundary, {}",
                status, c.id, c.instances, c.skipped, mode
            )?;
            if let Some(n) = &c.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
            for v in &c.violations {
                writeln!(f, "      [{}] {}", v.witness.join(", "), v.detail)?;
            }
        }
        Ok(())
    }
}
