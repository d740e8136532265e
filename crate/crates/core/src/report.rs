//! Machine-readable check reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The inequality was evaluated but a hypothesis it depends on could not
    /// be established.
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// One evaluated inequality `lhs <= rhs`.
///
/// `pass` always equals `margin >= -tolerance` with `margin = rhs - lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub constants: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub outcome: Outcome,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        let pass = margin >= -tolerance;
        CheckReport {
            name: name.into(),
            constants: BTreeMap::new(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass,
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            inputs_digest: String::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
        self
    }

    pub fn digest(mut self, digest: String) -> Self {
        self.inputs_digest = digest;
        self
    }

    /// Marks the report inconclusive regardless of the numeric verdict.
    pub fn inconclusive(mut self, reason: &str) -> Self {
        self.outcome = Outcome::Inconclusive;
        self.detail("inconclusive_reason", reason)
    }

    /// Recomputes the verdict from the stored numbers.
    pub fn is_consistent(&self) -> bool {
        let m = self.rhs - self.lhs;
        let margin_ok = self.margin == m || (self.margin.is_nan() && m.is_nan());
        margin_ok && self.pass == (self.margin >= -self.tolerance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_markdown(&self) -> String {
        markdown_table(std::slice::from_ref(self))
    }
}

/// A markdown table with one row per report.
pub fn markdown_table(reports: &[CheckReport]) -> String {
    let mut out = String::from("| check | outcome | lhs | rhs | margin | tolerance | constants |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for r in reports {
        let constants: Vec<String> = r.constants.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {:.6e} | {:.6e} | {:.3e} | {:.1e} | {} |",
            r.name,
            r.outcome.as_str(),
            r.lhs,
            r.rhs,
            r.margin,
            r.tolerance,
            constants.join(", ")
        );
    }
    out
}

/// Overall outcome of a set of reports: any failure fails; otherwise any
/// inconclusive report makes the set inconclusive.
pub fn aggregate(reports: &[CheckReport]) -> Outcome {
    if reports.iter().any(|r| r.outcome == Outcome::Fail) {
        Outcome::Fail
    } else if reports.iter().any(|r| r.outcome == Outcome::Inconclusive) {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    }
}

/// SHA-256 over a canonical byte encoding of check inputs.
#[derive(Clone, Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn new(tag: &str) -> Self {
        InputDigest::default().text(tag)
    }

    pub fn text(mut self, s: &str) -> Self {
        self.hasher.update((s.len() as u64).to_le_bytes());
        self.hasher.update(s.as_bytes());
        self
    }

    pub fn scalar(mut self, v: f64) -> Self {
        self.hasher.update(v.to_bits().to_le_bytes());
        self
    }

    pub fn values(mut self, vs: &[f64]) -> Self {
        self.hasher.update((vs.len() as u64).to_le_bytes());
        for v in vs {
            self.hasher.update(v.to_bits().to_le_bytes());
        }
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_margin() {
        let r = CheckReport::new("x", 1.0, 1.0 - 1e-13, 1e-12);
        assert!(r.pass && r.is_consistent());
        let r = CheckReport::new("x", 1.0, 0.9, 1e-12);
        assert!(!r.pass && r.outcome == Outcome::Fail && r.is_consistent());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = InputDigest::new("t").values(&[1.0, 2.0]).finish();
        let b = InputDigest::new("t").values(&[1.0, 2.0]).finish();
        let c = InputDigest::new("t").values(&[1.0, 2.0000001]).finish();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let r = CheckReport::new("lsi", 0.5, 1.0, 1e-12).constant("K", 1.0).detail("n", 3);
        let back: CheckReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_markdown().contains("| lsi | pass |"));
    }

    #[test]
    fn aggregation_is_three_valued() {
        let p = CheckReport::new("a", 0.0, 1.0, 0.0);
        let f = CheckReport::new("b", 2.0, 1.0, 0.0);
        let i = p.clone().inconclusive("hypothesis");
        assert_eq!(aggregate(&[p.clone()]), Outcome::Pass);
        assert_eq!(aggregate(&[p.clone(), i.clone()]), Outcome::Inconclusive);
        assert_eq!(aggregate(&[p, i, f]), Outcome::Fail);
    }
}
