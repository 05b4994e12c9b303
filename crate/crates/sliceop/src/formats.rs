//! JSON and CSV formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sliceop_core::semigroup::{CheckKind, SemigroupReport};
use sliceop_core::{Multivector, RightLinearOperator};

use crate::error::CliError;
use crate::fixtures;

/// `{"n": 2, "m": 2, "entries": [[element, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDef {
    pub n: u8,
    pub m: usize,
    pub entries: Vec<Vec<Multivector>>,
}

impl OperatorDef {
    pub fn from_operator(a: &RightLinearOperator) -> Self {
        Self { n: a.n(), m: a.m(), entries: a.rows() }
    }

    pub fn to_operator(&self) -> Result<RightLinearOperator, CliError> {
        if self.entries.len() != self.m || self.entries.iter().any(|r| r.len() != self.m) {
            return Err(CliError::input(format!("operator entries must form an {0}x{0} matrix", self.m)));
        }
        if self.entries.iter().flatten().any(|e| e.n() != self.n) {
            return Err(CliError::input(format!("every entry must live in R_{}", self.n)));
        }
        Ok(RightLinearOperator::from_rows(self.entries.clone())?)
    }
}

/// Where an operator comes from: inline, a file, or a built-in name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSource {
    Inline(OperatorDef),
    File { file: PathBuf },
    Builtin(String),
}

impl OperatorSource {
    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<RightLinearOperator, CliError> {
        match self {
            OperatorSource::Inline(def) => def.to_operator(),
            OperatorSource::File { file } => {
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                parse_operator(&text)
            }
            OperatorSource::Builtin(name) => fixtures::builtin_operator(name)
                .ok_or_else(|| CliError::input(format!("unknown built-in operator {name:?}"))),
        }
    }
}

pub fn parse_operator(json: &str) -> Result<RightLinearOperator, CliError> {
    serde_json::from_str::<OperatorDef>(json)?.to_operator()
}

pub fn operator_json(a: &RightLinearOperator) -> String {
    serde_json::to_string_pretty(&OperatorDef::from_operator(a)).expect("serializable")
}

/// Shortest decimal that round-trips to the same binary64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// Flat report CSV: `check_id,residual,tol,pass`.
pub fn report_csv(rep: &SemigroupReport) -> String {
    let mut t = Table::new(&["check_id", "residual", "tol", "pass"]);
    for r in &rep.records {
        let pass = match r.kind {
            CheckKind::Check => r.pass.to_string(),
            CheckKind::Diagnostic => "diagnostic".into(),
        };
        t.push(vec![r.id.clone(), fmt_f64(r.residual), fmt_f64(r.tol), pass]);
    }
    t.to_csv()
}

/// Report JSON with non-finite residuals written as strings.
pub fn report_json(rep: &SemigroupReport) -> String {
    let mut v = serde_json::to_value(rep).expect("serializable");
    if let Some(recs) = v.get_mut("records").and_then(|r| r.as_array_mut()) {
        for (rec, src) in recs.iter_mut().zip(&rep.records) {
            for (key, x) in [("residual", src.residual), ("tol", src.tol)] {
                if !x.is_finite() {
                    rec[key] = serde_json::Value::String(fmt_f64(x));
                }
            }
        }
    }
    serde_json::to_string_pretty(&v).expect("serializable")
}

/// Write `contents` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip_is_bit_exact() {
        let a = fixtures::random_operator(2, 3, 1.0, 7);
        let back = parse_operator(&operator_json(&a)).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn malformed_operators_are_rejected() {
        assert!(parse_operator("{").is_err());
        let bad = r#"{"n": 2, "m": 2, "entries": [[{"n": 2, "coeff": {"": 1.0}}]]}"#;
        assert!(matches!(parse_operator(bad), Err(CliError::Input(_))));
        let mixed = r#"{"n": 2, "m": 1, "entries": [[{"n": 3, "coeff": {"123": 1.0}}]]}"#;
        assert!(parse_operator(mixed).is_err());
    }

    #[test]
    fn floats_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::FRAC_1_SQRT_2] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn sources() {
        let s: OperatorSource = serde_json::from_str(r#""remark58""#).unwrap();
        assert_eq!(s.load(None).unwrap(), fixtures::remark58());
        let s: OperatorSource = serde_json::from_str(r#"{"file": "missing.json"}"#).unwrap();
        assert!(matches!(s.load(None), Err(CliError::Io { .. })));
        let s: OperatorSource = serde_json::from_str(r#""nope""#).unwrap();
        assert!(s.load(None).is_err());
    }
}
