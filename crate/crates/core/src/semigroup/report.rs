use alloc::string::String;
use alloc::vec::Vec;

/// Whether a record gates the verdict or is informational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckKind {
    Check,
    Diagnostic,
}

/// One verified identity or estimate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckRecord {
    pub id: String,
    /// The identity being checked, as a formula.
    pub anchor: String,
    pub operands: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub kind: CheckKind,
    /// Filled in by callers that time checks; zero otherwise.
    pub wall_time_s: f64,
}

impl CheckRecord {
    /// A gating check: passes iff `residual <= tol`.
    pub fn check(id: &str, anchor: &str, operands: String, residual: f64, tol: f64) -> Self {
        let pass = residual.is_finite() && residual >= 0.0 && residual <= tol;
        Self {
            id: id.into(),
            anchor: anchor.into(),
            operands,
            residual,
            tol,
            pass,
            kind: CheckKind::Check,
            wall_time_s: 0.0,
        }
    }

    /// Informational value; always passes.
    pub fn diagnostic(id: &str, anchor: &str, operands: String, value: f64) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            operands,
            residual: value,
            tol: 0.0,
            pass: true,
            kind: CheckKind::Diagnostic,
            wall_time_s: 0.0,
        }
    }
}

/// Ordered collection of [`CheckRecord`]s.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SemigroupReport {
    pub records: Vec<CheckRecord>,
}

impl SemigroupReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn extend(&mut self, other: SemigroupReport) {
        self.records.extend(other.records);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn get(&self, id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Stable sort by check id.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.id.cmp(&b.id));
    }
}
