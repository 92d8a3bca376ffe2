//! Machine-readable results of exact checks.

use serde::Serialize;

use crate::exactla::Q;

/// One failing instance of a checked identity, with enough data to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub level: usize,
    /// Index of the base simplex in the canonical nerve enumeration.
    pub simplex: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Q>>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Violation {
    pub fn new(rule: impl Into<String>, level: usize, simplex: usize) -> Violation {
        Violation {
            rule: rule.into(),
            level,
            simplex,
            degree: None,
            witness: None,
            detail: String::new(),
        }
    }

    pub fn degree(mut self, d: usize) -> Violation {
        self.degree = Some(d);
        self
    }

    pub fn witness(mut self, w: Vec<Q>) -> Violation {
        self.witness = Some(w);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Violation {
        self.detail = d.into();
        self
    }
}

/// Outcome of one named check: how many instances were examined and which failed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.into(),
            checked: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Record one examined instance; `failure` is pushed if present.
    pub fn record(&mut self, failure: Option<Violation>) {
        self.checked += 1;
        if let Some(v) = failure {
            self.violations.push(v);
        }
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// A bundle of named checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed())
    }
}
