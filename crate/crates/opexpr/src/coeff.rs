//! Exact coefficients: finite Laurent polynomials in ħ with rational
//! coefficients. ħ stays symbolic until a numeric value is supplied.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coeff(BTreeMap<i32, BigRational>);

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

impl Coeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    pub fn integer(n: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(n)), 0)
    }

    pub fn hbar_power(power: i32) -> Self {
        Self::monomial(BigRational::one(), power)
    }

    pub fn monomial(value: BigRational, power: i32) -> Self {
        let mut map = BTreeMap::new();
        if !value.is_zero() {
            map.insert(power, value);
        }
        Self(map)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `(ħ-power, rational)` pairs in ascending power.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.0.iter().map(|(&p, r)| (p, r))
    }

    pub fn max_power(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }

    pub fn scale_hbar(&self, shift: i32) -> Self {
        Self(self.0.iter().map(|(&p, r)| (p + shift, r.clone())).collect())
    }

    pub fn eval(&self, hbar: f64) -> f64 {
        self.terms()
            .map(|(p, r)| r.to_f64().unwrap_or(f64::NAN) * hbar.powi(p))
            .sum()
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        for (&p, r) in &rhs.0 {
            let entry = self.0.entry(p).or_insert_with(BigRational::zero);
            *entry += r;
            if entry.is_zero() {
                self.0.remove(&p);
            }
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(self.0.iter().map(|(&p, r)| (p, -r)).collect())
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for (&p, r) in &self.0 {
            for (&q, s) in &rhs.0 {
                out += &Coeff::monomial(r * s, p + q);
            }
        }
        out
    }
}

/// Renders one monomial `r·ħ^p` in the input grammar: `2/3*hbar^2`, `hbar`, `-1`.
pub fn fmt_monomial(f: &mut fmt::Formatter<'_>, r: &BigRational, p: i32) -> fmt::Result {
    let hbar = match p {
        0 => None,
        1 => Some("hbar".to_string()),
        _ => Some(format!("hbar^{p}")),
    };
    match hbar {
        None => write!(f, "{r}"),
        Some(h) if r.is_one() => write!(f, "{h}"),
        Some(h) if r.is_negative() && (-r).is_one() => write!(f, "-1*{h}"),
        Some(h) => write!(f, "{r}*{h}"),
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, r)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_monomial(f, r, p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_merges_and_cancels() {
        let a = &Coeff::integer(2) + &Coeff::hbar_power(1);
        let b = &a - &Coeff::integer(2);
        assert_eq!(b, Coeff::hbar_power(1));
        assert!((&a - &a).is_zero());
        let sq = &a * &a;
        assert_eq!(sq.to_string(), "4 + 4*hbar + hbar^2");
    }

    #[test]
    fn inverse_powers_cancel() {
        let p = &Coeff::hbar_power(-1) * &Coeff::monomial(rational(-3, 2), 1);
        assert_eq!(p, Coeff::monomial(rational(-3, 2), 0));
        assert_eq!(p.to_string(), "-3/2");
    }

    #[test]
    fn evaluation() {
        let c = &Coeff::monomial(rational(1, 2), 2) + &Coeff::hbar_power(-1);
        assert!((c.eval(2.0) - 2.5).abs() < 1e-15);
    }
}
