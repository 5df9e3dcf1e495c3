//! Seeded random expressions of bounded degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::expr::Expr;

fn scalar(rng: &mut impl Rng) -> Expr {
    let mut numer = rng.random_range(-3i64..=3);
    if numer == 0 {
        numer = 1;
    }
    let denom = rng.random_range(1i64..=3);
    Expr::Scalar {
        value: BigRational::new(BigInt::from(numer), BigInt::from(denom)),
        hbar_power: rng.random_range(0..=1),
    }
}

/// Scalar times a word of at most `budget` letters; `N_k` costs two.
fn monomial(rng: &mut impl Rng, budget: usize, modes: u32) -> Expr {
    let mut items = vec![scalar(rng)];
    let mut left = rng.random_range(0..=budget);
    while left > 0 {
        let mode = rng.random_range(1..=modes);
        if left >= 2 && rng.random_bool(0.15) {
            items.push(Expr::number(mode));
            left -= 2;
        } else {
            items.push(if rng.random_bool(0.5) { Expr::raise(mode) } else { Expr::lower(mode) });
            left -= 1;
        }
    }
    Expr::Product(items)
}

fn node(rng: &mut impl Rng, budget: usize, modes: u32, depth: usize) -> Expr {
    let roll = rng.random_range(0..10);
    if depth < 2 && budget >= 2 && roll < 3 {
        let left = rng.random_range(1..budget);
        let right = rng.random_range(1..=budget - left);
        Expr::commutator(node(rng, left, modes, depth + 1), node(rng, right, modes, depth + 1))
    } else if depth < 2 && roll < 6 {
        let n = rng.random_range(2..=3);
        Expr::Sum((0..n).map(|_| node(rng, budget, modes, depth + 1)).collect())
    } else {
        monomial(rng, budget, modes)
    }
}

/// Expression whose expanded words all have length ≤ `max_degree`, over
/// mode ids `1..=modes`.
pub fn random_expr(rng: &mut impl Rng, max_degree: usize, modes: u32) -> Expr {
    node(rng, max_degree, modes.max(1), 0)
}
