use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qkin_core::constants::UnitSystem;
use qkin_core::hegerfeldt::SpreadingConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config value for `{key}`: {reason}")]
    Value { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: [f64; 3],
    pub helicity: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSetSpec {
    pub cutoff: usize,
    pub modes: Vec<ModeSpec>,
}

impl ModeSetSpec {
    pub fn label(&self) -> String {
        format!("modes{}.cutoff{}", self.modes.len(), self.cutoff)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub number_cutoffs: Vec<usize>,
    pub ccr_cutoffs: Vec<usize>,
    pub weyl_cutoffs: Vec<usize>,
    pub svn_points: usize,
    pub svn_length: f64,
    pub svn_states: usize,
    pub opexpr_cutoff: usize,
    pub opexpr_expressions: usize,
    pub hegerfeldt: SpreadingConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            number_cutoffs: vec![4, 16, 64],
            ccr_cutoffs: vec![16, 64],
            weyl_cutoffs: vec![16, 32, 64, 128],
            svn_points: 512,
            svn_length: 240.0,
            svn_states: 10,
            opexpr_cutoff: 8,
            opexpr_expressions: 200,
            hegerfeldt: SpreadingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub unit_system: UnitSystem,
    /// Unset: the Fock suite sweeps ħ ∈ {0.5, 1, 2} and the rest use 1.
    /// Ignored in SI mode.
    pub hbar_value: Option<f64>,
    pub seeds: Vec<u64>,
    /// Per-check tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub mode_sets: Vec<ModeSetSpec>,
    pub grids: GridConfig,
}

pub const DEFAULT_HBAR_SWEEP: [f64; 3] = [0.5, 1.0, 2.0];

impl Default for SuiteConfig {
    fn default() -> Self {
        let mode = |k: [f64; 3], helicity| ModeSpec { k, helicity };
        Self {
            unit_system: UnitSystem::Natural,
            hbar_value: None,
            seeds: vec![13],
            tolerances: BTreeMap::new(),
            mode_sets: vec![
                ModeSetSpec { cutoff: 8, modes: vec![mode([1.0, 0.0, 0.0], 1)] },
                ModeSetSpec { cutoff: 6, modes: vec![mode([1.0, 0.0, 0.0], 1), mode([0.0, 2.0, 0.0], -1)] },
                ModeSetSpec {
                    cutoff: 4,
                    modes: vec![mode([1.0, 0.0, 0.0], 1), mode([1.0, 0.0, 0.0], -1), mode([0.0, 0.0, 1.5], 1)],
                },
            ],
            grids: GridConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(h) = self.hbar_value {
            if !(h.is_finite() && h > 0.0) {
                return Err(invalid("hbar_value", "must be positive and finite"));
            }
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed is required"));
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(invalid(&format!("tolerances.{name}"), "must be non-negative and finite"));
            }
        }
        if self.mode_sets.is_empty() {
            return Err(invalid("mode_sets", "at least one mode set is required"));
        }
        for (i, ms) in self.mode_sets.iter().enumerate() {
            if ms.modes.is_empty() {
                return Err(invalid(&format!("mode_sets[{i}].modes"), "empty mode list"));
            }
            if ms.cutoff < 2 {
                return Err(invalid(&format!("mode_sets[{i}].cutoff"), "must be at least 2"));
            }
            if let Some(m) = ms.modes.iter().find(|m| m.helicity.abs() != 1) {
                return Err(invalid(&format!("mode_sets[{i}].modes.helicity"), format!("{} is not ±1", m.helicity)));
            }
        }
        let g = &self.grids;
        for (key, list) in [
            ("grids.number_cutoffs", &g.number_cutoffs),
            ("grids.ccr_cutoffs", &g.ccr_cutoffs),
            ("grids.weyl_cutoffs", &g.weyl_cutoffs),
        ] {
            if list.is_empty() || list.iter().any(|&n| n < 2) {
                return Err(invalid(key, "needs at least one cutoff, each ≥ 2"));
            }
        }
        if g.svn_states == 0 || g.svn_points < 8 || !(g.svn_length > 0.0) {
            return Err(invalid("grids.svn_*", "need svn_states ≥ 1, svn_points ≥ 8, svn_length > 0"));
        }
        if g.opexpr_cutoff < 5 || g.opexpr_expressions == 0 {
            return Err(invalid("grids.opexpr_*", "need opexpr_cutoff ≥ 5 and at least one expression"));
        }
        Ok(())
    }

    /// ħ values for the Fock-space suite.
    pub fn hbar_sweep(&self) -> Vec<f64> {
        match (self.unit_system, self.hbar_value) {
            (UnitSystem::Si, _) => vec![1.0],
            (_, Some(h)) => vec![h],
            (_, None) => DEFAULT_HBAR_SWEEP.to_vec(),
        }
    }

    /// ħ for suites that use a single value of the representation scale.
    pub fn hbar(&self) -> f64 {
        match (self.unit_system, self.hbar_value) {
            (UnitSystem::Natural, Some(h)) => h,
            _ => 1.0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seeds[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = SuiteConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(SuiteConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn shipped_configs_parse() {
        let default = include_str!("../../../configs/default.toml");
        assert_eq!(SuiteConfig::from_toml_str(default).unwrap(), SuiteConfig::default());
        let si = SuiteConfig::from_toml_str(include_str!("../../../configs/si.toml")).unwrap();
        assert_eq!(si.unit_system, UnitSystem::Si);
        assert_eq!(si.hbar_sweep(), vec![1.0]);
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(SuiteConfig::from_toml_str("").unwrap(), SuiteConfig::default());
    }

    #[test]
    fn unknown_keys_rejected_with_name() {
        let err = SuiteConfig::from_toml_str("hbar_valu = 2.0").unwrap_err();
        assert!(err.to_string().contains("hbar_valu"), "{err}");
        let err = SuiteConfig::from_toml_str("[grids]\nsvn_pionts = 3").unwrap_err();
        assert!(err.to_string().contains("svn_pionts"), "{err}");
        let err = SuiteConfig::from_toml_str("[grids.hegerfeldt]\nmas = 1.0").unwrap_err();
        assert!(err.to_string().contains("mas"), "{err}");
    }

    #[test]
    fn values_validated() {
        assert!(SuiteConfig::from_toml_str("hbar_value = -1.0").is_err());
        assert!(SuiteConfig::from_toml_str("seeds = []").is_err());
        assert!(SuiteConfig::from_toml_str("[[mode_sets]]\ncutoff = 3\nmodes = [{ k = [1.0, 0.0, 0.0], helicity = 2 }]").is_err());
        assert!(SuiteConfig::from_toml_str("unit_system = \"imperial\"").is_err());
    }

    #[test]
    fn unit_system_and_hbar() {
        let si = SuiteConfig::from_toml_str("unit_system = \"SI\"\nhbar_value = 3.0").unwrap();
        assert_eq!(si.hbar_sweep(), vec![1.0]);
        assert_eq!(si.hbar(), 1.0);
        let nat = SuiteConfig::from_toml_str("hbar_value = 2.0").unwrap();
        assert_eq!(nat.hbar_sweep(), vec![2.0]);
        assert_eq!(SuiteConfig::default().hbar_sweep(), vec![0.5, 1.0, 2.0]);
    }
}
