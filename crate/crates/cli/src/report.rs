//! Aggregated run results with deterministic JSON and CSV export.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qkin_core::constants::UnitSystem;
use qkin_core::report::CheckReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub unit_system: UnitSystem,
    pub hbar: Vec<f64>,
    pub seeds: Vec<u64>,
    pub passed: usize,
    pub total: usize,
    pub failed: Vec<String>,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(suite: &str, unit_system: UnitSystem, hbar: Vec<f64>, seeds: Vec<u64>, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        Self {
            suite: suite.to_string(),
            unit_system,
            hbar,
            seeds,
            passed: checks.len() - failed.len(),
            total: checks.len(),
            failed,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        // non-finite errors are not representable in JSON; serde_json writes them as null
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check: name, status, error, tolerance.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:<60} err={:.3e} tol={:.3e}\n", c.name, c.measured_error, c.tolerance));
        }
        out.push_str(&format!("{}: {}/{} checks passed\n", self.suite, self.passed, self.total));
        out
    }

    /// Writes `report.json`, `summary.csv` and one CSV per tabulated check.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        let mut summary = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_error)?;
        summary.write_record(["name", "passed", "measured_error", "tolerance", "anchor"]).map_err(csv_error)?;
        for c in &self.checks {
            summary
                .write_record([
                    c.name.as_str(),
                    if c.passed { "true" } else { "false" },
                    &format!("{:e}", c.measured_error),
                    &format!("{:e}", c.tolerance),
                    c.anchor.as_str(),
                ])
                .map_err(csv_error)?;
            if !c.columns.is_empty() {
                let mut table = csv::WriterBuilder::new()
                    .flexible(true)
                    .from_path(dir.join(format!("{}.csv", c.name)))
                    .map_err(csv_error)?;
                table.write_record(&c.columns).map_err(csv_error)?;
                for row in &c.details {
                    table.write_record(row).map_err(csv_error)?;
                }
                table.flush()?;
            }
        }
        summary.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkin_core::report::PLUMBING;

    fn sample() -> Report {
        let checks = vec![
            CheckReport::new("b.second", PLUMBING, 2.0, 1.0),
            CheckReport::new("a.first", PLUMBING, 0.0, 1.0).with_columns(["x", "y"]).with_row(["1", "2"]),
        ];
        Report::new("all", UnitSystem::Natural, vec![1.0], vec![13], checks)
    }

    #[test]
    fn checks_sorted_and_counted() {
        let r = sample();
        assert_eq!(r.checks[0].name, "a.first");
        assert_eq!((r.passed, r.total), (1, 2));
        assert_eq!(r.failed, vec!["b.second".to_string()]);
        assert!(!r.all_passed());
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn writes_tables() {
        let dir = tempfile::tempdir().unwrap();
        sample().write_dir(dir.path()).unwrap();
        let table = fs::read_to_string(dir.path().join("a.first.csv")).unwrap();
        assert_eq!(table, "x,y\n1,2\n");
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
    }
}
