use serde::{Deserialize, Serialize};

/// Anchor recorded for checks that exercise infrastructure only.
pub const PLUMBING: &str = "plumbing";

/// Outcome of one check: `passed` holds exactly when `measured_error <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured_error: f64,
    pub tolerance: f64,
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<Vec<String>>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, measured_error: f64, tolerance: f64) -> Self {
        let anchor = anchor.into();
        debug_assert!(!anchor.is_empty());
        Self {
            name: name.into(),
            passed: measured_error <= tolerance,
            measured_error,
            tolerance,
            anchor,
            columns: Vec::new(),
            details: Vec::new(),
        }
    }

    /// Check of the form `value >= threshold`, encoded as the ratio
    /// `threshold / value` against tolerance 1.
    pub fn lower_bound(name: impl Into<String>, anchor: impl Into<String>, value: f64, threshold: f64) -> Self {
        let ratio = if value > 0.0 { threshold / value } else { f64::INFINITY };
        Self::new(name, anchor, ratio, 1.0)
    }

    /// Boolean predicate: error 0 when it holds, 1 otherwise, tolerance 0.
    pub fn predicate(name: impl Into<String>, anchor: impl Into<String>, holds: bool) -> Self {
        Self::new(name, anchor, if holds { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn with_columns<S: Into<String>>(mut self, columns: impl IntoIterator<Item = S>) -> Self {
        self.columns = columns.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_row<S: Into<String>>(mut self, row: impl IntoIterator<Item = S>) -> Self {
        self.details.push(row.into_iter().map(Into::into).collect());
        self
    }

    pub fn push_row<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.details.push(row.into_iter().map(Into::into).collect());
    }

    pub fn with_note(self, key: &str, value: impl ToString) -> Self {
        self.with_row([key.to_string(), value.to_string()])
    }
}

pub fn fmt_sci(x: f64) -> String {
    format!("{x:.6e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_iff_error_within_tolerance() {
        assert!(CheckReport::new("a", PLUMBING, 1e-11, 1e-10).passed);
        assert!(CheckReport::new("a", PLUMBING, 1e-10, 1e-10).passed);
        assert!(!CheckReport::new("a", PLUMBING, 2e-10, 1e-10).passed);
        assert!(!CheckReport::new("a", PLUMBING, f64::NAN, 1e-10).passed);
    }

    #[test]
    fn lower_bound_encoding() {
        assert!(CheckReport::lower_bound("x", PLUMBING, 2e-13, 1e-13).passed);
        assert!(!CheckReport::lower_bound("x", PLUMBING, 5e-14, 1e-13).passed);
        assert!(!CheckReport::lower_bound("x", PLUMBING, 0.0, 1e-13).passed);
    }
}
