//! Machine-readable verdicts.

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimReport {
    pub id: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Ratio of singular values at the rank cut; an exactly vanishing value
    /// below the cut is written as the string `"inf"`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_gap")]
    pub gap: Option<f64>,
    /// Only filled on request, so that reports are reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn serialize_gap<S: Serializer>(gap: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match gap {
        Some(g) if g.is_infinite() => s.serialize_str("inf"),
        Some(g) => s.serialize_f64(*g),
        None => s.serialize_none(),
    }
}

impl ClaimReport {
    pub fn new(id: &str, anchor: &str, ok: bool, measured: Value, expected: Value) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::from_bool(ok),
            measured,
            expected,
            residual: None,
            gap: None,
            runtime_ms: None,
            detail: None,
        }
    }

    /// A claim that could not be evaluated because an upstream stage failed.
    pub fn skipped(id: &str, anchor: &str, expected: Value, reason: &str) -> Self {
        let mut c = Self::new(id, anchor, false, Value::Null, expected);
        c.detail = Some(format!("not evaluated: {reason}"));
        c
    }

    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }

    pub fn with_gap(mut self, gap: Option<f64>) -> Self {
        self.gap = gap;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub claims: Vec<ClaimReport>,
    pub config_echo: RunConfig,
    pub version: String,
}

impl Report {
    pub fn new(claims: Vec<ClaimReport>, config: &RunConfig) -> Self {
        Self { claims, config_echo: config.clone(), version: env!("CARGO_PKG_VERSION").into() }
    }

    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| !c.passed()).count()
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimReport> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Process exit code: 0 when every claim passes, otherwise the number of
/// failures, capped below the code reserved for configuration errors.
pub fn exit_code(failures: usize) -> u8 {
    failures.min(254) as u8
}

pub const CONFIG_ERROR_EXIT: u8 = 255;

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn optional_fields_are_omitted() {
        let c = ClaimReport::new("x", "statement", true, json!(1), json!(1));
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v, json!({ "id": "x", "anchor": "statement", "status": "pass", "measured": 1, "expected": 1 }));
    }

    #[test]
    fn infinite_gap_is_a_string() {
        let c = ClaimReport::new("x", "s", true, json!(0), json!(0)).with_gap(Some(f64::INFINITY));
        assert_eq!(serde_json::to_value(&c).unwrap()["gap"], json!("inf"));
        let c = c.with_gap(Some(12.5));
        assert_eq!(serde_json::to_value(&c).unwrap()["gap"], json!(12.5));
    }

    #[test]
    fn skipped_claims_fail() {
        let c = ClaimReport::skipped("x", "s", json!(3), "upstream");
        assert!(!c.passed());
        assert_eq!(c.measured, Value::Null);
        assert!(c.detail.unwrap().contains("upstream"));
    }

    #[test]
    fn exit_code_counts_failures_below_config_code() {
        assert_eq!(exit_code(0), 0);
        assert_eq!(exit_code(7), 7);
        assert_eq!(exit_code(10_000), 254);
        assert!(exit_code(usize::MAX) < CONFIG_ERROR_EXIT);
    }

    #[test]
    fn report_counts_failures() {
        let claims = vec![
            ClaimReport::new("a", "s", true, json!(0), json!(0)),
            ClaimReport::new("b", "s", false, json!(1), json!(0)),
        ];
        let r = Report::new(claims, &RunConfig::default());
        assert_eq!(r.failures(), 1);
        assert!(r.claim("b").is_some());
        assert!(r.to_json().ends_with('\n'));
    }
}
