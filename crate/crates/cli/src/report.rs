//! Named checks and verification reports.

use serde::Serialize;

/// A value a check compares.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
            Value::Flag(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub got: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// `|expected - got| ≤ tolerance`
    pub fn close(name: impl Into<String>, expected: f64, got: f64, tolerance: f64) -> Self {
        let pass = (expected - got).abs() <= tolerance;
        Self { name: name.into(), expected: expected.into(), got: got.into(), tolerance: Some(tolerance), pass }
    }

    /// `got ≤ bound`
    pub fn at_most(name: impl Into<String>, bound: f64, got: f64) -> Self {
        Self { name: name.into(), expected: bound.into(), got: got.into(), tolerance: None, pass: got <= bound }
    }

    /// `got > bound`
    pub fn above(name: impl Into<String>, bound: f64, got: f64) -> Self {
        Self { name: name.into(), expected: bound.into(), got: got.into(), tolerance: None, pass: got > bound }
    }

    pub fn equal(name: impl Into<String>, expected: impl Into<Value>, got: impl Into<Value>) -> Self {
        let (expected, got) = (expected.into(), got.into());
        let pass = expected == got;
        Self { name: name.into(), expected, got, tolerance: None, pass }
    }

    pub fn holds(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), expected: true.into(), got: Value::Text(detail.into()), tolerance: None, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn new(id: usize, title: impl Into<String>, checks: Vec<Check>, seconds: f64) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        Self { id, title: title.into(), checks, pass, seconds }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One summary line, `PASS` or `FAIL` first.
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        format!(
            "{status} criterion {}: {} ({} checks, {failed} failed, {:.1}s)",
            self.id,
            self.title,
            self.checks.len(),
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub criteria: Vec<CriterionReport>,
    pub pass: bool,
    pub seed: u64,
}

impl VerificationReport {
    pub fn new(criteria: Vec<CriterionReport>, seed: u64) -> Self {
        let pass = criteria.iter().all(|c| c.pass);
        Self { criteria, pass, seed }
    }

    /// Every check in order.
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.criteria.iter().flat_map(|c| c.checks.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_requires_every_check() {
        let ok = CriterionReport::new(1, "a", vec![Check::close("x", 1.0, 1.0 + 1e-13, 1e-12)], 0.0);
        let bad = CriterionReport::new(2, "b", vec![Check::at_most("y", 0.1, 0.2)], 0.0);
        assert!(ok.pass && !bad.pass);
        assert!(VerificationReport::new(vec![ok.clone()], 1).pass);
        assert!(!VerificationReport::new(vec![ok, bad.clone()], 1).pass);
        assert!(bad.line().starts_with("FAIL criterion 2"));
        assert!(!CriterionReport::new(3, "empty", vec![], 0.0).pass);
    }

    #[test]
    fn text_checks() {
        assert!(Check::equal("m", "32/49", "32/49").pass);
        assert!(!Check::equal("m", "32/49", "1/2").pass);
        assert!(Check::above("s", 3.0, 3.5).pass);
    }
}
