//! Output formats and the stable record schemas.
//!
//! json-records mode emits one self-delimiting JSON object per line;
//! parsing a record into its schema type and re-serializing reproduces
//! the bytes. csv mode quotes any field containing a separator, a quote,
//! or a newline.

use clap::ValueEnum;
use collatz_core::nat_serde;
use collatz_core::types::{Nat, StopReason};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    #[value(name = "json-records", alias = "json")]
    JsonRecords,
    Csv,
}

/// A forward trace (also the complete-orbit output of `reverse
/// --complete`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub record: String,
    #[serde(with = "nat_serde::decimal")]
    pub start: Nat,
    pub odd_only: bool,
    pub stop: StopReason,
    #[serde(with = "nat_serde::decimal_vec")]
    pub terms: Vec<Nat>,
}

/// A reverse walk with both the full terms and the odd backbone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReverseTraceRecord {
    pub record: String,
    #[serde(with = "nat_serde::decimal")]
    pub start: Nat,
    pub stop: StopReason,
    #[serde(with = "nat_serde::decimal_opt")]
    pub converged_to: Option<Nat>,
    #[serde(with = "nat_serde::decimal_vec")]
    pub terms: Vec<Nat>,
    #[serde(with = "nat_serde::decimal_vec")]
    pub odd_terms: Vec<Nat>,
}

/// Everything `analyze` derives from one odd number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub record: String,
    #[serde(with = "nat_serde::decimal")]
    pub n: Nat,
    pub binary: String,
    pub tail_length: u64,
    pub high_exponents: Vec<u64>,
    #[serde(with = "nat_serde::decimal_vec")]
    pub predicted_odd_iterates: Vec<Nat>,
    #[serde(with = "nat_serde::decimal_opt")]
    pub descent_witness: Option<Nat>,
    pub descent_steps: Option<u64>,
    #[serde(with = "nat_serde::decimal_opt")]
    pub predecessor_base: Option<Nat>,
    #[serde(with = "nat_serde::decimal")]
    pub reduce_to_multiple_of_3: Nat,
}

/// One property-suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub record: String,
    pub name: String,
    pub checked: u64,
    pub pass: bool,
    pub failures: Vec<String>,
}

pub fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

pub fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        assert_eq!(csv_row(&["27", "82"]), "27,82");
        assert_eq!(csv_row(&["a,b", "c\"d"]), "\"a,b\",\"c\"\"d\"");
        assert_eq!(csv_row(&["line\nbreak"]), "\"line\nbreak\"");
    }

    #[test]
    fn records_round_trip_bytes() {
        let rec = TraceRecord {
            record: "trace".into(),
            start: Nat::from(27u32),
            odd_only: false,
            stop: StopReason::ReachedOne,
            terms: vec![Nat::from(27u32), Nat::from(82u32)],
        };
        let line = serde_json::to_string(&rec).unwrap();
        let back: TraceRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), line);
    }
}
