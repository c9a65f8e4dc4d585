use serde::Serialize;

use crate::linalg::C64;

/// One named residual compared against a tolerance.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Informative checks are reported but never gate the overall verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informative: bool,
    /// Optional measured quantity (a fitted scalar, an offset, a ratio …) as [re, im].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        CheckReport {
            name: name.into(),
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
            informative: false,
            value: None,
            note: None,
        }
    }

    /// A check that passes when the residual EXCEEDS the threshold
    /// (used for demonstrating that a relation fails).
    pub fn exceeds(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let mut c = CheckReport::new(name, residual, threshold);
        c.pass = residual.is_finite() && residual > threshold;
        c.note = Some("expected to exceed threshold".into());
        c
    }

    pub fn informative(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        let mut c = CheckReport::new(name, residual, tol);
        c.informative = true;
        c
    }

    pub fn with_value(mut self, v: C64) -> Self {
        self.value = Some([v.re, v.im]);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn gating_pass(&self) -> bool {
        self.informative || self.pass
    }
}

/// An ordered list of checks.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct RelationReport {
    pub checks: Vec<CheckReport>,
}

impl RelationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
    }

    pub fn add(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        self.push(CheckReport::new(name, residual, tol));
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.checks.extend(other.checks);
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}{}", c.name);
        }
        self
    }

    /// True iff every non-informative entry passes.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.gating_pass())
    }

    /// Largest residual among gating entries that compare against zero.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| !c.informative && c.note.as_deref() != Some("expected to exceed threshold"))
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&CheckReport> {
        self.checks.iter().filter(|c| !c.gating_pass()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}
