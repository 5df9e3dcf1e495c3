//! Finite-dimensional verification kernels for canonical commutation
//! relations, photon-sector spectra, modular theory and localization.

pub mod constants;
pub mod error;
pub mod fock;
pub mod hegerfeldt;
pub mod linalg;
pub mod modular;
pub mod photon;
pub mod random;
pub mod report;
pub mod scaffold;

pub use error::{Error, Result};
