//! Check records and their JSON, CSV and terminal renderings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    /// Short name of the claim being checked.
    pub anchor: String,
    pub computed: Value,
    pub expected: Value,
    /// Where the expected value comes from: "closed-form", "oracle", "exact"
    /// or "plumbing".
    pub provenance: String,
    pub tol: f64,
    pub pass: bool,
    pub gap: Option<f64>,
    pub leakage: Option<f64>,
}

impl Record {
    /// `computed <= tol` against an expected zero.
    pub fn residual(id: impl Into<String>, anchor: &str, provenance: &str, computed: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            computed: num(computed),
            expected: num(0.0),
            provenance: provenance.into(),
            tol,
            pass: computed.is_finite() && computed <= tol,
            gap: None,
            leakage: None,
        }
    }

    /// `|computed - expected| <= tol`.
    pub fn close(id: impl Into<String>, anchor: &str, provenance: &str, computed: f64, expected: f64, tol: f64) -> Self {
        Self {
            pass: (computed - expected).abs() <= tol,
            expected: num(expected),
            ..Self::residual(id, anchor, provenance, computed, tol)
        }
    }

    /// `computed >= bound`.
    pub fn at_least(id: impl Into<String>, anchor: &str, provenance: &str, computed: f64, bound: f64) -> Self {
        Self { pass: computed >= bound, expected: num(bound), tol: 0.0, ..Self::residual(id, anchor, provenance, computed, 0.0) }
    }

    /// Exact equality of integers, strings or booleans.
    pub fn exact<T: Serialize + PartialEq>(id: impl Into<String>, anchor: &str, provenance: &str, computed: T, expected: T) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            pass: computed == expected,
            computed: serde_json::to_value(computed).unwrap_or(Value::Null),
            expected: serde_json::to_value(expected).unwrap_or(Value::Null),
            provenance: provenance.into(),
            tol: 0.0,
            gap: None,
            leakage: None,
        }
    }

    pub fn failed(id: impl Into<String>, anchor: &str, error: impl ToString) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            computed: Value::String(error.to_string()),
            expected: Value::Null,
            provenance: "plumbing".into(),
            tol: 0.0,
            pass: false,
            gap: None,
            leakage: None,
        }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_leakage(mut self, leakage: f64) -> Self {
        self.leakage = Some(leakage);
        self
    }

    fn show(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => match n.as_f64() {
                Some(x) if n.is_f64() => format!("{x:.3e}"),
                _ => n.to_string(),
            },
            other => other.to_string(),
        }
    }

    /// One terminal line, e.g. `car n=2: index = 2   PASS`.
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let claim = match &self.computed {
            Value::Bool(true) => self.id.clone(),
            Value::Bool(false) => format!("{}: no", self.id),
            v => format!("{} = {}", self.id, Self::show(v)),
        };
        let mut extra = String::new();
        if !self.pass {
            extra = format!("  [{}; expected {}", self.anchor, Self::show(&self.expected));
            if let Some(g) = self.gap {
                extra += &format!("; gap {g:.2e}");
            }
            if let Some(l) = self.leakage {
                extra += &format!("; leakage {l:.2e}");
            }
            extra.push(']');
        }
        format!("{status}  {claim}{extra}")
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: Config,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, config: &Config, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let summary = Summary { total: records.len(), passed, failed: records.len() - passed };
        Self { suite: suite.into(), config: config.clone(), records, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "anchor", "computed", "expected", "provenance", "tol", "pass", "gap", "leakage"])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.id.clone(),
                r.anchor.clone(),
                Record::show(&r.computed),
                Record::show(&r.expected),
                r.provenance.clone(),
                r.tol.to_string(),
                r.pass.to_string(),
                opt(r.gap),
                opt(r.leakage),
            ])?;
        }
        w.flush()
    }

    pub fn print(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "suite {}", self.suite)?;
        for r in &self.records {
            writeln!(out, "  {}", r.line())?;
        }
        writeln!(out, "{} checks, {} passed, {} failed", self.summary.total, self.summary.passed, self.summary.failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_name_the_claim() {
        let r = Record::exact("car n=2: index", "index of the CAR system", "exact", 2, 2);
        assert_eq!(r.line(), "PASS  car n=2: index = 2");
        let g = Record::exact("clifford: gauge group trivial", "gauge group", "exact", true, true);
        assert_eq!(g.line(), "PASS  clifford: gauge group trivial");
        let f = Record::residual("x", "a claim", "oracle", 1.0, 1e-3).with_gap(0.5);
        assert!(f.line().starts_with("FAIL") && f.line().contains("a claim") && f.line().contains("gap"));
    }

    #[test]
    fn summary_counts() {
        let recs = vec![Record::residual("a", "", "", 0.0, 1.0), Record::failed("b", "", "cap")];
        let r = Report::new("t", &Config::default(), recs);
        assert_eq!(r.summary, Summary { total: 2, passed: 1, failed: 1 });
        assert!(!r.all_pass());
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["records"][1]["computed"], "cap");
        assert!(v["config"]["seed"].is_u64());
    }
}
