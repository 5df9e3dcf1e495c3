//! Normal ordering by the single rewrite `a_k a†_k′ → a†_k′ a_k + ħδ_kk′`,
//! plus the exact swaps of commuting raise/raise and lower/lower pairs.

use std::cmp::Reverse;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use qkin_core::random::seeded;

use crate::coeff::{fmt_monomial, Coeff};
use crate::expr::{Expr, LadderKind, Letter, Word};

/// Which out-of-order adjacent pair is rewritten next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// One printed term `coefficient · ħ^hbar_power · word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: BigRational,
    pub hbar_power: i32,
    pub word: Word,
}

/// Normal-ordered words with merged, nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<Word, Coeff>,
}

pub fn is_normal_word(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] <= p[1])
}

/// Net `raise − lower` count per mode.
pub fn grading(w: &[Letter]) -> BTreeMap<u32, i64> {
    let mut g = BTreeMap::new();
    for l in w {
        let e = g.entry(l.mode).or_insert(0);
        *e += match l.kind {
            LadderKind::Raise => 1,
            LadderKind::Lower => -1,
        };
    }
    g.retain(|_, v| *v != 0);
    g
}

impl NormalForm {
    fn insert(&mut self, word: Word, coeff: &Coeff) {
        match self.terms.entry(word) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff.clone());
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &[Letter]) -> Option<&Coeff> {
        self.terms.get(word)
    }

    /// Terms in canonical print order: longer words first, then letter
    /// order, then ascending ħ power.
    pub fn terms(&self) -> Vec<Term> {
        let mut words: Vec<&Word> = self.terms.keys().collect();
        words.sort_by_key(|w| (Reverse(w.len()), *w));
        words
            .into_iter()
            .flat_map(|w| {
                self.terms[w].terms().map(move |(p, r)| Term {
                    coefficient: r.clone(),
                    hbar_power: p,
                    word: w.clone(),
                })
            })
            .collect()
    }

    pub fn max_hbar_power(&self) -> Option<i32> {
        self.terms.values().filter_map(Coeff::max_power).max()
    }

    pub fn to_expr(&self) -> Expr {
        Expr::Sum(
            self.terms()
                .into_iter()
                .map(|t| {
                    let mut items = vec![Expr::Scalar { value: t.coefficient, hbar_power: t.hbar_power }];
                    items.extend(t.word.into_iter().map(Expr::Ladder));
                    Expr::Product(items)
                })
                .collect(),
        )
    }

    pub fn scaled(&self, c: &Coeff) -> NormalForm {
        let mut out = NormalForm::default();
        for (w, d) in &self.terms {
            out.insert(w.clone(), &(c * d));
        }
        out
    }
}

impl Add for &NormalForm {
    type Output = NormalForm;
    fn add(self, rhs: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c);
        }
        out
    }
}

impl Sub for &NormalForm {
    type Output = NormalForm;
    fn sub(self, rhs: &NormalForm) -> NormalForm {
        self + &rhs.scaled(&Coeff::integer(-1))
    }
}

fn fmt_word(f: &mut fmt::Formatter<'_>, w: &[Letter]) -> fmt::Result {
    let mut i = 0;
    while i < w.len() {
        let run = w[i..].iter().take_while(|l| **l == w[i]).count();
        if i > 0 {
            write!(f, "*")?;
        }
        write!(f, "{}", w[i])?;
        if run > 1 {
            write!(f, "^{run}")?;
        }
        i += run;
    }
    Ok(())
}

/// `ad1*a1 + hbar`, `-1 * a1`, `ad1^2*a1^2 + 4*hbar * ad1*a1 + 2*hbar^2`.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.word.is_empty() {
                fmt_monomial(f, &t.coefficient, t.hbar_power)?;
            } else if t.coefficient.is_one() && t.hbar_power == 0 {
                fmt_word(f, &t.word)?;
            } else {
                fmt_monomial(f, &t.coefficient, t.hbar_power)?;
                write!(f, " * ")?;
                fmt_word(f, &t.word)?;
            }
        }
        Ok(())
    }
}

pub fn normal_order(e: &Expr) -> NormalForm {
    normal_order_with(e, Strategy::Leftmost)
}

pub fn normal_order_with(e: &Expr, strategy: Strategy) -> NormalForm {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(seeded(seed)),
        _ => None,
    };
    let mut pending = e.expand();
    let mut out = NormalForm::default();
    while let Some((c, mut w)) = pending.pop() {
        let disorder: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]).collect();
        let Some(&first) = disorder.first() else {
            out.insert(w, &c);
            continue;
        };
        let i = match (strategy, rng.as_mut()) {
            (Strategy::Rightmost, _) => *disorder.last().unwrap(),
            (Strategy::Random(_), Some(rng)) => disorder[rng.random_range(0..disorder.len())],
            _ => first,
        };
        let (x, y) = (w[i], w[i + 1]);
        if x.kind == LadderKind::Lower && y.kind == LadderKind::Raise && x.mode == y.mode {
            let mut contracted = w.clone();
            contracted.drain(i..i + 2);
            pending.push((c.scale_hbar(1), contracted));
        }
        w.swap(i, i + 1);
        pending.push((c, w));
    }
    out
}

pub fn symbolic_commutator(a: &Expr, b: &Expr) -> NormalForm {
    normal_order(&Expr::commutator(a.clone(), b.clone()))
}
