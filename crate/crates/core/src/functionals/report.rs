use serde::{Deserialize, Serialize};

/// Context attached to a [`VerificationReport`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: Option<u64>,
    /// Grid sizes of the inputs.
    pub sizes: Vec<usize>,
    pub family: Option<String>,
}

/// Both sides of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `slack >= -tol * (1 + |rhs|)`.
    pub holds: bool,
    pub meta: ReportMeta,
}

impl VerificationReport {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self { lhs, rhs, slack, holds: slack >= -tol * (1.0 + rhs.abs()), meta: ReportMeta::default() }
    }

    pub fn with_meta(mut self, meta: ReportMeta) -> Self {
        self.meta = meta;
        self
    }
}
