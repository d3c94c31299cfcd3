//! Verification reports: one `Check` per compared quantity, serialised as JSON or a text table.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub inputs: Value,
    pub lhs: Value,
    pub rhs: Value,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub floor: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Check {
    /// Numeric comparison; passes when rel_err ≤ tolerance or abs_err ≤ floor.
    pub fn compare(name: &str, inputs: Value, lhs: Complex64, rhs: Complex64, tolerance: f64, floor: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_err = if scale == 0.0 { 0.0 } else { abs_err / scale };
        Check {
            name: name.to_string(),
            inputs,
            lhs: complex_json(lhs),
            rhs: complex_json(rhs),
            abs_err,
            rel_err,
            tolerance,
            floor,
            pass: rel_err <= tolerance || abs_err <= floor,
            note: None,
        }
    }

    /// A measured quantity against an upper bound (e.g. a residual or a defect).
    pub fn bound(name: &str, inputs: Value, measured: f64, bound: f64) -> Self {
        Check {
            name: name.to_string(),
            inputs,
            lhs: json!(measured),
            rhs: json!(bound),
            abs_err: measured,
            rel_err: measured,
            tolerance: bound,
            floor: 0.0,
            pass: measured <= bound,
            note: None,
        }
    }

    /// An exact comparison of displayable values.
    pub fn exact<T: PartialEq + ToString>(name: &str, inputs: Value, lhs: T, rhs: T) -> Self {
        let pass = lhs == rhs;
        let e = if pass { 0.0 } else { 1.0 };
        Check {
            name: name.to_string(),
            inputs,
            lhs: json!(lhs.to_string()),
            rhs: json!(rhs.to_string()),
            abs_err: e,
            rel_err: e,
            tolerance: 0.0,
            floor: 0.0,
            pass,
            note: None,
        }
    }

    /// A predicate that either holds or not.
    pub fn holds(name: &str, inputs: Value, pass: bool) -> Self {
        Self::exact(name, inputs, pass, true)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Reports an evaluation error as a failed check.
    pub fn error(name: &str, inputs: Value, err: &crate::Error) -> Self {
        Check {
            name: name.to_string(),
            inputs,
            lhs: Value::Null,
            rhs: Value::Null,
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            tolerance: 0.0,
            floor: 0.0,
            pass: false,
            note: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub totals: Totals,
    /// Wall time; left out of JSON unless requested so equal configs give identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: &str, config: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        Report {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            config,
            checks,
            totals: Totals { passed, failed },
            runtime_ms: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.totals.failed == 0
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serialisable values")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(out, "suite {} (schema {})", self.suite, self.schema_version);
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}  {:>10}  result", "name", "abs_err", "rel_err", "tol");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10.3e}  {:>10.3e}  {:>10.3e}  {}{}",
                c.name,
                c.abs_err,
                c.rel_err,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" },
                c.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default()
            );
        }
        let _ = writeln!(out, "{} passed, {} failed", self.totals.passed, self.totals.failed);
        if let Some(ms) = self.runtime_ms {
            let _ = writeln!(out, "runtime {ms} ms");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_and_serialisation() {
        let a = Check::compare("x", json!({}), Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-4, 0.0), 1e-3, 0.0);
        assert!(a.pass);
        let b = Check::compare("y", json!({}), Complex64::new(1e-20, 0.0), Complex64::new(0.0, 0.0), 1e-3, 1e-15);
        assert!(b.pass && b.rel_err == 1.0);
        let r = Report::new("demo", json!({"seed": 1}), vec![a, b, Check::holds("z", json!(null), false)]);
        assert_eq!(r.totals.passed, 2);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!(v.get("runtime_ms").is_none());
        assert!(r.to_table().contains("FAIL"));
    }
}
