//! Physical constants. SI values are the exact CODATA 2018 defining
//! constants (SI redefinition of 2019); this table is the only place they
//! appear.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planck constant h, J·s (exact).
pub const PLANCK_SI: f64 = 6.626_070_15e-34;
/// Speed of light c, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// Boltzmann constant k_B, J/K (exact).
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Natural,
    #[serde(rename = "SI", alias = "si")]
    Si,
}

impl std::str::FromStr for UnitSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" | "Natural" => Ok(Self::Natural),
            "SI" | "si" => Ok(Self::Si),
            other => Err(format!("unknown unit system '{other}' (expected SI or natural)")),
        }
    }
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Natural => f.write_str("natural"),
            Self::Si => f.write_str("SI"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const NATURAL: Self = Self {
        hbar: 1.0,
        c: 1.0,
        k_b: 1.0,
    };

    pub fn si() -> Self {
        Self {
            hbar: PLANCK_SI / (2.0 * PI),
            c: SPEED_OF_LIGHT_SI,
            k_b: BOLTZMANN_SI,
        }
    }

    pub fn for_units(units: UnitSystem) -> Self {
        match units {
            UnitSystem::Natural => Self::NATURAL,
            UnitSystem::Si => Self::si(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_planck_constant() {
        let hbar = PhysicalConstants::si().hbar;
        assert!((hbar - 1.054_571_817e-34).abs() / hbar < 1e-9);
    }

    #[test]
    fn unit_parsing() {
        assert_eq!("SI".parse::<UnitSystem>().unwrap(), UnitSystem::Si);
        assert_eq!("natural".parse::<UnitSystem>().unwrap(), UnitSystem::Natural);
        assert!("cgs".parse::<UnitSystem>().is_err());
    }
}
