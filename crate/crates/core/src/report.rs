//! Machine-readable command results.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// The certificate re-verifies the verdict without search.
    Certificate,
    /// Exhaustive search within the reported budget.
    ExhaustiveSearch,
    /// The budget ran out before a verdict.
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub limit: u64,
    pub used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub instance_hash: Option<String>,
    pub verdict: String,
    /// `None` when the command only computes data.
    pub holds: Option<bool>,
    pub basis: Basis,
    pub certificates: Option<Value>,
    pub budgets: Budget,
    pub deviations: Vec<String>,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        verdict: impl Into<String>,
        holds: Option<bool>,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            instance_hash: None,
            verdict: verdict.into(),
            holds,
            basis: Basis::ExhaustiveSearch,
            certificates: None,
            budgets: Budget { limit: 0, used: 0 },
            deviations: Vec::new(),
        }
    }

    /// Attaches a certificate; an empty object or array counts as none.
    pub fn with_certificate(mut self, value: Value) -> Self {
        let empty = match &value {
            Value::Null => true,
            Value::Object(m) => m.is_empty(),
            Value::Array(a) => a.is_empty(),
            _ => false,
        };
        if empty {
            self.certificates = None;
        } else {
            self.certificates = Some(value);
            self.basis = Basis::Certificate;
        }
        self
    }

    pub fn with_deviation(mut self, note: impl Into<String>) -> Self {
        self.deviations.push(note.into());
        self
    }
}

/// Hex SHA-256 of a canonical document text.
pub fn instance_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "text" => Some(Format::Text),
            _ => None,
        }
    }
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "command: {}", report.command);
            let _ = writeln!(s, "verdict: {}", report.verdict);
            if let Some(h) = report.holds {
                let _ = writeln!(s, "holds: {h}");
            }
            let basis = serde_json::to_value(report.basis).expect("basis serializes");
            let _ = writeln!(s, "basis: {}", basis.as_str().unwrap_or_default());
            if let Some(h) = &report.instance_hash {
                let _ = writeln!(s, "instance: {h}");
            }
            let _ = writeln!(
                s,
                "budget: {} of {}",
                report.budgets.used, report.budgets.limit
            );
            match &report.certificates {
                Some(c) => {
                    let _ = writeln!(
                        s,
                        "certificate:\n{}",
                        serde_json::to_string_pretty(c).expect("json values serialize")
                    );
                }
                None => s.push_str("certificate: none\n"),
            }
            for d in &report.deviations {
                let _ = writeln!(s, "deviation: {d}");
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_certificate_is_null() {
        let r = Report::new("universal s", "universal", Some(true)).with_certificate(json!({}));
        let v: Value = serde_json::from_str(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(v["certificates"], Value::Null);
        assert_eq!(v["basis"], "exhaustive-search");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            instance_hash("set A { a }\n"),
            instance_hash("set A { a }\n")
        );
        assert_eq!(instance_hash("").len(), 64);
    }
}
