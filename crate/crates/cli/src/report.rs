use std::collections::BTreeMap;
use std::fmt::Write as _;

use hvb::report::{CheckReport, Violation};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub name: String,
    pub sha256: String,
}

/// What a command prints and writes with `--json`.
///
/// `checks` decide the exit code; `properties` are reported but never fail a run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<CheckReport>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            inputs: Vec::new(),
            passed: true,
            checks: Vec::new(),
            properties: Vec::new(),
            summary: BTreeMap::new(),
            timing_ms: None,
        }
    }

    pub fn check(&mut self, c: CheckReport) {
        self.passed &= c.passed();
        self.checks.push(c);
    }

    pub fn property(&mut self, c: CheckReport) {
        self.properties.push(c);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for i in &self.inputs {
            let _ = writeln!(s, "  input {} sha256:{}", i.name, &i.sha256[..16]);
        }
        for c in &self.checks {
            line(&mut s, c, if c.passed() { "PASS" } else { "FAIL" });
        }
        for c in &self.properties {
            line(&mut s, c, if c.passed() { "yes " } else { "no  " });
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "  {k}: {v}");
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(s, "  time: {ms} ms");
        }
        let _ = writeln!(s, "{}", if self.passed { "ok" } else { "FAILED" });
        s
    }
}

fn line(s: &mut String, c: &CheckReport, tag: &str) {
    let _ = write!(s, "  {tag} {} ({} checked", c.name, c.checked);
    if !c.passed() {
        let _ = write!(s, ", {} failed", c.violations.len());
    }
    s.push_str(")\n");
    if let Some(v) = c.first() {
        let _ = writeln!(s, "       first: {}", describe(v));
    }
}

fn describe(v: &Violation) -> String {
    let mut s = format!("{} at level {}, simplex {}", v.rule, v.level, v.simplex);
    if let Some(d) = v.degree {
        let _ = write!(s, ", degree {d}");
    }
    if let Some(w) = &v.witness {
        let parts: Vec<String> = w.iter().map(|q| q.to_string()).collect();
        let _ = write!(s, ", witness [{}]", parts.join(", "));
    }
    if !v.detail.is_empty() {
        let _ = write!(s, " ({})", v.detail);
    }
    s
}

/// A single yes/no expectation; `source` is the underlying violation when there is one.
pub fn expect(name: impl Into<String>, ok: bool, source: Option<&Violation>) -> CheckReport {
    let name = name.into();
    let mut c = CheckReport::new(name.clone());
    c.record((!ok).then(|| source.cloned().unwrap_or_else(|| Violation::new(name, 0, 0).detail("expected outcome not observed"))));
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_flips_the_verdict() {
        let mut r = Report::new("t");
        r.check(expect("a", true, None));
        assert!(r.passed);
        r.property(expect("b", false, None));
        assert!(r.passed);
        r.check(expect("c", false, None));
        assert!(!r.passed);
        assert!(r.to_text().contains("FAIL c"));
    }

    #[test]
    fn json_has_no_timing_unless_asked() {
        let r = Report::new("t");
        assert!(!serde_json::to_string(&r).unwrap().contains("timing_ms"));
    }
}
