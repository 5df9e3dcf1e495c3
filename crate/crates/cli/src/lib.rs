//! Suite runner behind the `qkin` binary.

pub mod config;
pub mod report;
pub mod suites;

use std::thread;

use qkin_core::report::CheckReport;

pub use config::{ConfigError, SuiteConfig};
pub use report::Report;
pub use suites::SUITES;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("unknown suite `{0}` (expected one of: all, {list})", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("tolerance override `{0}` matches no check in this run")]
    UnknownOverride(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn run_one(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckReport>, RunError> {
    let mut out = Vec::new();
    for (i, &seed) in cfg.seeds.iter().enumerate() {
        let mut seeded = cfg.clone();
        seeded.seeds = vec![seed];
        let checks = suites::suite_checks(name, &seeded).ok_or_else(|| RunError::UnknownSuite(name.into()))?;
        if i == 0 {
            out.extend(checks);
        } else {
            out.extend(checks.into_iter().map(|mut c| {
                c.name = format!("{}.seed{seed}", c.name);
                c
            }));
        }
    }
    Ok(out)
}

/// Replaces the tolerance of every check whose name equals the key or
/// starts with `key.`; a key matching nothing is an error.
pub fn apply_overrides(checks: &mut [CheckReport], cfg: &SuiteConfig) -> Result<(), RunError> {
    for (key, &tol) in &cfg.tolerances {
        let prefix = format!("{key}.");
        let mut hit = false;
        for c in checks.iter_mut().filter(|c| c.name == *key || c.name.starts_with(&prefix)) {
            c.tolerance = tol;
            c.passed = c.measured_error <= tol;
            hit = true;
        }
        if !hit {
            return Err(RunError::UnknownOverride(key.clone()));
        }
    }
    Ok(())
}

/// Runs one suite, or every suite in parallel for `"all"`.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let mut checks = if name == "all" {
        let results: Vec<_> = thread::scope(|s| {
            let handles: Vec<_> = SUITES.iter().map(|&n| s.spawn(move || run_one(n, cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        });
        results.into_iter().collect::<Result<Vec<_>, _>>()?.concat()
    } else {
        run_one(name, cfg)?
    };
    if name == "all" {
        apply_overrides(&mut checks, cfg)?;
    } else {
        // overrides aimed at other suites are ignored when running one suite
        let own: SuiteConfig = SuiteConfig {
            tolerances: cfg.tolerances.iter().filter(|(k, _)| k.split('.').next() == Some(name)).map(|(k, v)| (k.clone(), *v)).collect(),
            ..cfg.clone()
        };
        apply_overrides(&mut checks, &own)?;
    }
    Ok(Report::new(name, cfg.unit_system, cfg.hbar_sweep(), cfg.seeds.clone(), checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkin_core::report::PLUMBING;

    #[test]
    fn override_by_prefix() {
        let mut checks = vec![
            CheckReport::new("fock.ccr.cutoff4", PLUMBING, 1e-3, 1e-12),
            CheckReport::new("fock.ccrx", PLUMBING, 1e-3, 1e-12),
        ];
        let mut cfg = SuiteConfig::default();
        cfg.tolerances.insert("fock.ccr".into(), 1e-2);
        apply_overrides(&mut checks, &cfg).unwrap();
        assert!(checks[0].passed);
        assert!(!checks[1].passed);
        cfg.tolerances.insert("nope".into(), 1.0);
        assert!(matches!(apply_overrides(&mut checks, &cfg), Err(RunError::UnknownOverride(k)) if k == "nope"));
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("bogus", &SuiteConfig::default()), Err(RunError::UnknownSuite(_))));
    }
}
