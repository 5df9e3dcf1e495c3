//! Symbolic ladder-operator expressions: parsing, normal ordering with exact
//! coefficients polynomial in ħ, and evaluation on truncated Fock spaces.

pub mod checks;
pub mod coeff;
pub mod expr;
pub mod normal;
pub mod parse;
pub mod random;
pub mod realize;

pub use coeff::Coeff;
pub use expr::{Expr, LadderKind, Letter, Word};
pub use normal::{normal_order, normal_order_with, symbolic_commutator, NormalForm, Strategy, Term};
pub use parse::{parse, SyntaxError};
pub use realize::{projected_difference, realize, soundness_residual};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("mode {mode} is not declared (the mode set has modes 1..={declared})")]
    UnknownMode { mode: u32, declared: usize },
    #[error("degree {degree} leaves no projected states at cutoff {cutoff}")]
    DegreeExceedsCutoff { degree: usize, cutoff: usize },
    #[error(transparent)]
    Core(#[from] qkin_core::Error),
}
