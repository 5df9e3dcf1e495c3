use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coeff::{fmt_monomial, Coeff};

/// Raise sorts before lower so that a sorted word is normal-ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LadderKind {
    Raise,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub kind: LadderKind,
    pub mode: u32,
}

impl Letter {
    pub fn lower(mode: u32) -> Self {
        Self { kind: LadderKind::Lower, mode }
    }

    pub fn raise(mode: u32) -> Self {
        Self { kind: LadderKind::Raise, mode }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LadderKind::Raise => write!(f, "ad{}", self.mode),
            LadderKind::Lower => write!(f, "a{}", self.mode),
        }
    }
}

/// Word of ladder letters, applied right to left.
pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    /// `value · ħ^hbar_power`. Negative powers only arise from the `N` macro.
    Scalar { value: BigRational, hbar_power: i32 },
    Ladder(Letter),
    Identity,
    Commutator(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn lower(mode: u32) -> Self {
        Expr::Ladder(Letter::lower(mode))
    }

    pub fn raise(mode: u32) -> Self {
        Expr::Ladder(Letter::raise(mode))
    }

    pub fn hbar() -> Self {
        Expr::Scalar { value: BigRational::one(), hbar_power: 1 }
    }

    pub fn integer(n: i64) -> Self {
        Expr::Scalar { value: BigRational::from_integer(BigInt::from(n)), hbar_power: 0 }
    }

    /// `N_k = (1/ħ)·a†_k·a_k`.
    pub fn number(mode: u32) -> Self {
        Expr::Product(vec![
            Expr::Scalar { value: BigRational::one(), hbar_power: -1 },
            Expr::raise(mode),
            Expr::lower(mode),
        ])
    }

    pub fn commutator(a: Expr, b: Expr) -> Self {
        Expr::Commutator(Box::new(a), Box::new(b))
    }

    pub fn negated(self) -> Self {
        Expr::Product(vec![Expr::integer(-1), self])
    }

    /// Expands every sum, product and commutator into `(coefficient, word)`
    /// pairs with words kept in written order; no commutation is applied.
    pub fn expand(&self) -> Vec<(Coeff, Word)> {
        match self {
            Expr::Sum(items) => items.iter().flat_map(Expr::expand).collect(),
            Expr::Product(items) => items.iter().fold(vec![(Coeff::one(), Word::new())], |acc, item| {
                let rhs = item.expand();
                let mut out = Vec::with_capacity(acc.len() * rhs.len());
                for (c, w) in &acc {
                    for (d, v) in &rhs {
                        let coeff = c * d;
                        if !coeff.is_zero() {
                            out.push((coeff, w.iter().chain(v).copied().collect()));
                        }
                    }
                }
                out
            }),
            Expr::Scalar { value, hbar_power } => {
                let c = Coeff::monomial(value.clone(), *hbar_power);
                if c.is_zero() {
                    Vec::new()
                } else {
                    vec![(c, Word::new())]
                }
            }
            Expr::Ladder(l) => vec![(Coeff::one(), vec![*l])],
            Expr::Identity => vec![(Coeff::one(), Word::new())],
            Expr::Commutator(a, b) => {
                let ab = Expr::Product(vec![(**a).clone(), (**b).clone()]).expand();
                let ba = Expr::Product(vec![(**b).clone(), (**a).clone()]).expand();
                ab.into_iter().chain(ba.into_iter().map(|(c, w)| (-c, w))).collect()
            }
        }
    }

    /// Longest word after expansion.
    pub fn degree(&self) -> usize {
        self.expand().iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

fn needs_parens_in_product(e: &Expr) -> bool {
    matches!(e, Expr::Sum(items) if items.len() != 1)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Sum(items) if items.is_empty() => write!(f, "0"),
            Expr::Sum(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{item}")?;
                }
                Ok(())
            }
            Expr::Product(items) if items.is_empty() => write!(f, "I"),
            Expr::Product(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if needs_parens_in_product(item) {
                        write!(f, "({item})")?;
                    } else {
                        write!(f, "{item}")?;
                    }
                }
                Ok(())
            }
            Expr::Scalar { value, hbar_power } => fmt_monomial(f, value, *hbar_power),
            Expr::Ladder(l) => write!(f, "{l}"),
            Expr::Identity => write!(f, "I"),
            Expr::Commutator(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_order_puts_raise_first() {
        assert!(Letter::raise(3) < Letter::lower(1));
        assert!(Letter::lower(1) < Letter::lower(2));
    }

    #[test]
    fn expansion_of_commutator() {
        let e = Expr::commutator(Expr::lower(1), Expr::raise(1));
        let terms = e.expand();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], (Coeff::one(), vec![Letter::lower(1), Letter::raise(1)]));
        assert_eq!(terms[1], (Coeff::integer(-1), vec![Letter::raise(1), Letter::lower(1)]));
        assert_eq!(e.degree(), 2);
    }

    #[test]
    fn number_macro_expansion() {
        let terms = Expr::number(2).expand();
        assert_eq!(terms, vec![(Coeff::hbar_power(-1), vec![Letter::raise(2), Letter::lower(2)])]);
    }
}
