//! Named residuals with pass/fail against tolerances.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

/// A flat list of checks plus free-form notes that are reported but not
/// asserted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    /// Record `value ≤ tol`. NaN never passes.
    pub fn check(&mut self, name: impl Into<String>, value: f64, tol: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        });
        self
    }

    /// Record a boolean property; its value is 0 when it holds and 1 otherwise.
    pub fn flag(&mut self, name: impl Into<String>, holds: bool) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            value: if holds { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: holds,
        });
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn extend(&mut self, other: VerificationReport) -> &mut Self {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<44} {:>12.4e}  (tol {:.1e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tol
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}
