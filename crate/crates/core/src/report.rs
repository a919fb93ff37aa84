use serde::Serialize;

/// Outcome of a sampled certification run (Hölder constant of a wave,
/// submultiplicativity of a weight, Hölder bound of a function).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub passed: bool,
    /// Largest observed ratio (or smallest margin, see `worst_label`).
    pub worst: f64,
    pub worst_label: String,
    pub bound: f64,
    pub pairs: usize,
    pub violations: usize,
}

/// One checked level of a bound report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub n: u32,
    pub value: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
}

/// Explicit upper bound compared against computed values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Which result the bound comes from, e.g. `"sub: V^{1/gamma}_n <= K^p"`.
    pub statement: String,
    pub entries: Vec<BoundEntry>,
    pub max_value: f64,
    pub passed: bool,
}

impl BoundReport {
    pub(crate) fn from_entries(statement: impl Into<String>, entries: Vec<BoundEntry>) -> Self {
        let max_value = entries.iter().map(|e| e.value).fold(0.0, f64::max);
        let passed = entries.iter().all(|e| e.margin.is_none_or(|m| m >= 0.0));
        BoundReport {
            statement: statement.into(),
            entries,
            max_value,
            passed,
        }
    }

    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.margin.is_some_and(|m| m < 0.0))
            .count()
    }
}
