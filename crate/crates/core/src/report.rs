//! Structured results of identity checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::{Backend, MatEq};

/// Failures kept verbatim in a report; the total is always counted.
pub const MAX_LISTED_FAILURES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub identity: String,
    pub inputs: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub params: ReportParams,
    pub checks_run: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    pub max_abs_deviation: f64,
    pub passed: bool,
    /// Witnesses and measured tables (phase defects, proportionality constants, ...).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub tables: BTreeMap<String, serde_json::Value>,
    /// Wall time; left out of the JSON so that reports stay byte-identical across runs.
    #[serde(skip)]
    pub runtime_ms: u64,
}

impl VerifyReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are serializable")
    }
}

/// Accumulates check outcomes in call order.
#[derive(Debug, Clone, Default)]
pub struct Checker {
    checks_run: u64,
    failure_count: u64,
    failures: Vec<Failure>,
    max_dev: f64,
    tables: BTreeMap<String, serde_json::Value>,
}

impl Checker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a boolean outcome with its measured deviation.
    pub fn check(&mut self, identity: &str, inputs: impl FnOnce() -> String, ok: bool, deviation: f64) {
        self.checks_run += 1;
        if deviation.is_finite() {
            self.max_dev = self.max_dev.max(deviation);
        } else {
            self.max_dev = f64::MAX;
        }
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(Failure {
                    identity: identity.to_string(),
                    inputs: inputs(),
                    deviation: if deviation.is_finite() { deviation } else { f64::MAX },
                });
            }
        }
    }

    pub fn check_eq(&mut self, identity: &str, inputs: impl FnOnce() -> String, outcome: MatEq) {
        self.check(identity, inputs, outcome.equal, outcome.max_deviation);
    }

    /// Scalar comparison `|got − want| ≤ tol`.
    pub fn check_close(
        &mut self,
        identity: &str,
        inputs: impl FnOnce() -> String,
        got: num_complex::Complex64,
        want: num_complex::Complex64,
        tol: f64,
    ) {
        let dev = (got - want).norm();
        self.check(identity, inputs, dev <= tol, dev);
    }

    /// Records an error raised while building the operands of a check.
    pub fn check_result<T>(
        &mut self,
        identity: &str,
        inputs: impl FnOnce() -> String,
        res: &crate::Result<T>,
    ) -> bool {
        match res {
            Ok(_) => true,
            Err(e) => {
                let msg = e.to_string();
                self.check(identity, || format!("{} ({msg})", inputs()), false, f64::INFINITY);
                false
            }
        }
    }

    pub fn merge(&mut self, other: Checker) {
        self.checks_run += other.checks_run;
        self.failure_count += other.failure_count;
        self.max_dev = self.max_dev.max(other.max_dev);
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
        self.tables.extend(other.tables);
    }

    pub fn table(&mut self, key: &str, value: serde_json::Value) {
        self.tables.insert(key.to_string(), value);
    }

    pub fn checks_run(&self) -> u64 {
        self.checks_run
    }

    pub fn failure_count(&self) -> u64 {
        self.failure_count
    }

    pub fn finish(self, suite: &str, params: ReportParams) -> VerifyReport {
        VerifyReport {
            suite: suite.to_string(),
            params,
            checks_run: self.checks_run,
            failure_count: self.failure_count,
            passed: self.failure_count == 0,
            failures: self.failures,
            max_abs_deviation: self.max_dev,
            tables: self.tables,
            runtime_ms: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_iff_no_failures() {
        let mut c = Checker::new();
        c.check("x", || "a".into(), true, 0.0);
        let r = c.clone().finish("s", ReportParams::default());
        assert!(r.passed && r.failures.is_empty() && r.checks_run == 1);
        c.check("y", || "b".into(), false, 0.5);
        let r = c.finish("s", ReportParams::default());
        assert!(!r.passed);
        assert_eq!(r.failures[0].inputs, "b");
        assert_eq!(r.max_abs_deviation, 0.5);
    }

    #[test]
    fn runtime_is_not_serialized() {
        let mut r = Checker::new().finish("s", ReportParams::default());
        r.runtime_ms = 1234;
        assert!(!r.to_json_pretty().contains("runtime"));
    }

    #[test]
    fn failure_list_is_capped() {
        let mut c = Checker::new();
        for i in 0..(MAX_LISTED_FAILURES + 10) {
            c.check("z", || i.to_string(), false, 1.0);
        }
        let r = c.finish("s", ReportParams::default());
        assert_eq!(r.failures.len(), MAX_LISTED_FAILURES);
        assert_eq!(r.failure_count as usize, MAX_LISTED_FAILURES + 10);
    }
}
