//! Recursive-descent parser for the ladder-operator grammar
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ("^" INT)?
//! atom   := RATIONAL | "hbar" | "I" | LADDER | "[" expr "," expr "]" | "(" expr ")"
//! LADDER := ("a" | "ad" | "N") INT        RATIONAL := INT ("/" INT)?
//! ```
//!
//! Two extensions keep printed normal forms re-parsable: a rational literal
//! may carry a leading `-`, and scalar bases (`hbar`, rationals) accept a
//! negative exponent.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::expr::Expr;

pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: expected ", self.offset)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

const ATOM_START: &[&str] = &["rational", "hbar", "I", "a<k>", "ad<k>", "N<k>", "[", "("];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Word(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digit run");
            out.push((start, Tok::Int(n)));
        } else if b.is_ascii_alphabetic() {
            // a word absorbs trailing digits so that `ad12` is one token
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Word(src[start..i].to_string())));
        } else if b"+-*^/[](),".contains(&b) {
            out.push((i, Tok::Sym(b as char)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(SyntaxError {
                offset: i,
                expected: ATOM_START.to_vec(),
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        SyntaxError {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, c: char, expected: &[&'static str]) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut factors = Vec::new();
        push_flat(&mut factors, self.factor()?);
        while self.eat('*') {
            push_flat(&mut factors, self.factor()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let at = self.offset();
        let n = match self.peek() {
            Tok::Int(n) => n.to_u32().filter(|&n| n <= MAX_EXPONENT),
            _ => return Err(self.error(&["integer exponent"])),
        };
        let Some(n) = n else {
            return Err(self.error(&["integer exponent at most 64"]));
        };
        self.bump();
        power(base, n, negative).ok_or(SyntaxError {
            offset: at,
            expected: vec!["nonnegative exponent on an operator or nonzero scalar"],
            found: format!("`-{n}`"),
        })
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Int(n) => self.rational(n),
            Tok::Sym('-') => match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    Ok(match self.rational(n)? {
                        Expr::Scalar { value, hbar_power } => Expr::Scalar { value: -value, hbar_power },
                        other => other,
                    })
                }
                _ => Err(self.error(&["integer"])),
            },
            Tok::Sym('(') => {
                let inner = self.group(at, |p| p.expr())?;
                self.group(at, |p| p.expect(')', &["+", "-", "*", "^", ")"]))?;
                Ok(inner)
            }
            Tok::Sym('[') => {
                let lhs = self.group(at, |p| p.expr())?;
                self.group(at, |p| p.expect(',', &["+", "-", "*", "^", ","]))?;
                let rhs = self.group(at, |p| p.expr())?;
                self.group(at, |p| p.expect(']', &["+", "-", "*", "^", "]"]))?;
                Ok(Expr::commutator(lhs, rhs))
            }
            Tok::Word(w) => word(&w).ok_or(SyntaxError {
                offset: at,
                expected: ATOM_START.to_vec(),
                found: format!("`{w}`"),
            }),
            other => Err(SyntaxError {
                offset: at,
                expected: ATOM_START.to_vec(),
                found: other.to_string(),
            }),
        }
    }

    fn rational(&mut self, numer: BigInt) -> Result<Expr, SyntaxError> {
        let mut value = BigRational::from_integer(numer);
        if self.eat('/') {
            match self.peek().clone() {
                Tok::Int(d) if !d.is_zero() => {
                    self.bump();
                    value /= BigRational::from_integer(d);
                }
                _ => return Err(self.error(&["nonzero integer denominator"])),
            }
        }
        Ok(Expr::Scalar { value, hbar_power: 0 })
    }

    /// Errors that run off the end of the input inside a bracket are
    /// reported at the unmatched opening delimiter.
    fn group<T>(&mut self, open: usize, f: impl FnOnce(&mut Self) -> Result<T, SyntaxError>) -> Result<T, SyntaxError> {
        f(self).map_err(|mut e| {
            if e.offset == self.len {
                e.offset = open;
            }
            e
        })
    }
}

fn word(w: &str) -> Option<Expr> {
    match w {
        "hbar" => return Some(Expr::hbar()),
        "I" => return Some(Expr::Identity),
        _ => {}
    }
    let split = w.find(|c: char| c.is_ascii_digit())?;
    let (name, digits) = w.split_at(split);
    let mode: u32 = digits.parse().ok()?;
    match name {
        "a" => Some(Expr::lower(mode)),
        "ad" => Some(Expr::raise(mode)),
        "N" => Some(Expr::number(mode)),
        _ => None,
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Product(mut items) => {
            items.insert(0, Expr::integer(-1));
            Expr::Product(items)
        }
        other => other.negated(),
    }
}

fn push_flat(out: &mut Vec<Expr>, e: Expr) {
    match e {
        Expr::Product(items) => out.extend(items),
        other => out.push(other),
    }
}

fn power(base: Expr, n: u32, negative: bool) -> Option<Expr> {
    if let Expr::Scalar { value, hbar_power } = &base {
        if negative && value.is_zero() {
            return None;
        }
        let mut v = BigRational::one();
        for _ in 0..n {
            v *= value;
        }
        let p = hbar_power * n as i32;
        return Some(if negative {
            Expr::Scalar { value: v.recip(), hbar_power: -p }
        } else {
            Expr::Scalar { value: v, hbar_power: p }
        });
    }
    if negative && n > 0 {
        return None;
    }
    Some(match n {
        0 => Expr::Identity,
        1 => base,
        _ => {
            let mut items = Vec::new();
            for _ in 0..n {
                push_flat(&mut items, base.clone());
            }
            Expr::Product(items)
        }
    })
}

pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, len: text.len() };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["+", "-", "*", "^", "end of input"]));
    }
    Ok(e)
}
