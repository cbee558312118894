//! Validation reports shared by every checker.

use std::fmt;

use serde::Serialize;

/// One failing instance of a check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// Which family of conditions failed (e.g. `associativity`).
    pub check: String,
    /// Where: arity, signature, generator names.
    pub location: String,
    pub detail: String,
    /// Every composition signature `(h, i_1, …, i_h)` the instance evaluated.
    pub signatures: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub subject: String,
    /// Number of instances evaluated.
    pub checked: usize,
    /// Instances skipped because they leave the truncation window.
    pub unavailable: usize,
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, check: &str, location: impl Into<String>, detail: impl Into<String>) {
        self.failures.push(Failure {
            check: check.to_string(),
            location: location.into(),
            detail: detail.into(),
            signatures: Vec::new(),
        });
    }

    pub fn absorb(&mut self, other: ValidationReport) {
        self.checked += other.checked;
        self.unavailable += other.unavailable;
        self.failures.extend(other.failures);
    }

    /// Failures whose evaluated signatures include `signature`.
    pub fn failures_touching(&self, signature: &[usize]) -> Vec<&Failure> {
        self.failures
            .iter()
            .filter(|f| f.signatures.iter().any(|s| s == signature))
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_valid() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{status} {} (checked {}, unavailable {}, failures {})",
            self.subject,
            self.checked,
            self.unavailable,
            self.failures.len()
        )?;
        for fl in &self.failures {
            writeln!(f, "  [{}] {}: {}", fl.check, fl.location, fl.detail)?;
        }
        Ok(())
    }
}
