//! Check battery over seeded random expressions.

use qkin_core::fock::HbarScale;
use qkin_core::photon::{Helicity, ModeSet};
use qkin_core::random::seeded;
use qkin_core::report::{fmt_sci, CheckReport};

use crate::expr::{Expr, Letter};
use crate::normal::{grading, normal_order, normal_order_with, symbolic_commutator, NormalForm, Strategy};
use crate::parse::parse;
use crate::random::random_expr;
use crate::realize::soundness_residual;
use crate::Error;

pub const NORMAL_ORDER_ANCHOR: &str = "normal ordering from the canonical commutator a_k a†_k′ = a†_k′ a_k + ħδ_kk′";
pub const LADDER_ANCHOR: &str = "number operators raise and lower: [N, a†] = a†, [N, a] = −a";

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    pub seed: u64,
    pub count: usize,
    pub max_degree: usize,
    pub modes: u32,
    pub cutoff: usize,
    pub hbar: f64,
    pub tolerance: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { seed: 13, count: 200, max_degree: 4, modes: 3, cutoff: 8, hbar: 1.0, tolerance: 1e-9 }
    }
}

impl BatteryConfig {
    fn mode_set(&self) -> Result<ModeSet, Error> {
        let labels = (0..self.modes).map(|k| ([1.0 + k as f64, 0.0, 0.0], Helicity::Plus));
        Ok(ModeSet::new(labels, self.cutoff, HbarScale::new(self.hbar)?, 1.0)?)
    }

    fn expressions(&self, max_degree: usize, salt: u64) -> Vec<Expr> {
        let mut rng = seeded(self.seed.wrapping_add(salt));
        (0..self.count).map(|_| random_expr(&mut rng, max_degree, self.modes)).collect()
    }
}

/// Largest projected gap between an expression and its normal form.
pub fn soundness_check(cfg: &BatteryConfig) -> Result<CheckReport, Error> {
    let ms = cfg.mode_set()?;
    let mut worst = 0.0f64;
    let mut worst_expr = String::new();
    for e in cfg.expressions(cfg.max_degree, 0) {
        let r = soundness_residual(&e, &ms)?;
        if r > worst || worst_expr.is_empty() {
            worst = worst.max(r);
            worst_expr = e.to_string();
        }
    }
    Ok(CheckReport::new("opexpr.soundness", NORMAL_ORDER_ANCHOR, worst, cfg.tolerance)
        .with_note("expressions", cfg.count)
        .with_note("cutoff", cfg.cutoff)
        .with_note("worst_residual", fmt_sci(worst))
        .with_note("worst_expression", worst_expr))
}

/// Leftmost, rightmost and two randomized rewrite orders must agree exactly.
pub fn confluence_check(cfg: &BatteryConfig) -> CheckReport {
    let mut mismatches = 0usize;
    for (i, e) in cfg.expressions(cfg.max_degree, 0).iter().enumerate() {
        let base = normal_order_with(e, Strategy::Leftmost);
        let others = [
            Strategy::Rightmost,
            Strategy::Random(cfg.seed ^ (2 * i as u64 + 1)),
            Strategy::Random(cfg.seed ^ (2 * i as u64 + 2) << 32),
        ];
        mismatches += others.iter().filter(|&&s| normal_order_with(e, s) != base).count();
    }
    CheckReport::new("opexpr.confluence", NORMAL_ORDER_ANCHOR, mismatches as f64, 0.0).with_note("strategy_pairs", 3 * cfg.count)
}

pub fn jacobi_sum(a: &Expr, b: &Expr, c: &Expr) -> NormalForm {
    let ab = symbolic_commutator(a, b).to_expr();
    let bc = symbolic_commutator(b, c).to_expr();
    let ca = symbolic_commutator(c, a).to_expr();
    &(&symbolic_commutator(&ab, c) + &symbolic_commutator(&bc, a)) + &symbolic_commutator(&ca, b)
}

/// Nonvanishing Jacobi sums over random degree-≤2 triples.
pub fn jacobi_check(cfg: &BatteryConfig) -> CheckReport {
    let exprs = cfg.expressions(2, 1);
    let triples = exprs.len() / 3;
    let failures = exprs.chunks_exact(3).filter(|t| !jacobi_sum(&t[0], &t[1], &t[2]).is_empty()).count();
    CheckReport::new("opexpr.jacobi", NORMAL_ORDER_ANCHOR, failures as f64, 0.0).with_note("triples", triples)
}

fn random_words(cfg: &BatteryConfig, max_len: usize) -> Vec<Vec<Letter>> {
    use rand::Rng;
    let mut rng = seeded(cfg.seed.wrapping_add(2));
    (0..cfg.count)
        .map(|_| {
            let len = rng.random_range(0..=max_len);
            (0..len)
                .map(|_| {
                    let mode = rng.random_range(1..=cfg.modes);
                    if rng.random_bool(0.5) { Letter::raise(mode) } else { Letter::lower(mode) }
                })
                .collect()
        })
        .collect()
}

fn word_expr(w: &[Letter]) -> Expr {
    Expr::Product(w.iter().copied().map(Expr::Ladder).collect())
}

/// Every output term keeps the per-mode `raise − lower` count of its word.
pub fn grading_check(cfg: &BatteryConfig) -> CheckReport {
    let violations: usize = random_words(cfg, 6)
        .iter()
        .map(|w| {
            let g = grading(w);
            normal_order(&word_expr(w)).entries().filter(|(v, _)| grading(v) != g).count()
        })
        .sum();
    CheckReport::new("opexpr.grading", NORMAL_ORDER_ANCHOR, violations as f64, 0.0)
}

/// A word of length `L` normal-orders to ħ powers in `0..=⌊L/2⌋`.
pub fn hbar_degree_check(cfg: &BatteryConfig) -> CheckReport {
    let violations = random_words(cfg, 6)
        .iter()
        .filter(|w| {
            let nf = normal_order(&word_expr(w));
            let lo = nf.entries().filter_map(|(_, c)| c.min_power()).min().unwrap_or(0);
            let hi = nf.max_hbar_power().unwrap_or(0);
            lo < 0 || hi > (w.len() / 2) as i32
        })
        .count();
    CheckReport::new("opexpr.hbar_degree_bound", NORMAL_ORDER_ANCHOR, violations as f64, 0.0)
}

/// Printed normal forms of fixed inputs.
pub fn example_checks() -> Result<Vec<CheckReport>, Error> {
    let cases = [
        ("opexpr.example.contraction", "a1*ad1", "ad1*a1 + hbar", NORMAL_ORDER_ANCHOR),
        ("opexpr.example.distinct_modes", "a1*ad2", "ad2*a1", NORMAL_ORDER_ANCHOR),
        ("opexpr.example.quartic", "a1*a1*ad1*ad1", "ad1^2*a1^2 + 4*hbar * ad1*a1 + 2*hbar^2", NORMAL_ORDER_ANCHOR),
        ("opexpr.example.commutator_a_ad", "[a1, ad1]", "hbar", NORMAL_ORDER_ANCHOR),
        ("opexpr.example.commutator_a_a", "[a1, a2]", "0", NORMAL_ORDER_ANCHOR),
        ("opexpr.example.number_lowers", "[N1, a1]", "-1 * a1", LADDER_ANCHOR),
        ("opexpr.example.number_raises", "[N1, ad1]", "ad1", LADDER_ANCHOR),
    ];
    cases
        .iter()
        .map(|&(name, src, expected, anchor)| {
            let got = normal_order(&parse(src)?).to_string();
            Ok(CheckReport::predicate(name, anchor, got == expected)
                .with_note("input", src)
                .with_note("normal_form", got))
        })
        .collect()
}

pub fn checks(cfg: &BatteryConfig) -> Result<Vec<CheckReport>, Error> {
    let mut out = example_checks()?;
    out.push(soundness_check(cfg)?);
    out.push(confluence_check(cfg));
    out.push(jacobi_check(cfg));
    out.push(grading_check(cfg));
    out.push(hbar_degree_check(cfg));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_battery_passes() {
        let reports = checks(&BatteryConfig::default()).unwrap();
        for r in &reports {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn battery_scales_with_hbar() {
        let cfg = BatteryConfig { hbar: 2.5, count: 40, ..Default::default() };
        assert!(soundness_check(&cfg).unwrap().passed);
    }
}
