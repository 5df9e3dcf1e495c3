//! Numeric bridge: evaluates expressions on a truncated multimode Fock space.
//! Mode id `k` is the `k`-th mode of the set (1-based).

use num_traits::ToPrimitive;

use qkin_core::linalg::{CMatrix, C64};
use qkin_core::photon::{ModeSet, MultimodeOperator};

use crate::coeff::Coeff;
use crate::expr::{Expr, LadderKind, Word};
use crate::normal::{normal_order, NormalForm};
use crate::Error;

pub trait Realizable {
    /// `(coefficient, word)` pairs whose sum is the operator.
    fn words(&self) -> Vec<(Coeff, Word)>;
}

impl Realizable for Expr {
    fn words(&self) -> Vec<(Coeff, Word)> {
        self.expand()
    }
}

impl Realizable for NormalForm {
    fn words(&self) -> Vec<(Coeff, Word)> {
        self.entries().map(|(w, c)| (c.clone(), w.clone())).collect()
    }
}

fn mode_index(ms: &ModeSet, mode: u32) -> Result<usize, Error> {
    let declared = ms.mode_count();
    match mode as usize {
        k if (1..=declared).contains(&k) => Ok(k - 1),
        _ => Err(Error::UnknownMode { mode, declared }),
    }
}

/// `ħ^(e/2)`.
fn hbar_half_power(hbar: f64, e: i32) -> f64 {
    if e % 2 == 0 {
        hbar.powi(e / 2)
    } else {
        hbar.sqrt() * hbar.powi((e - 1) / 2)
    }
}

/// Matrix of the operator with ħ taken from the mode set.
///
/// Each word is applied to basis states letter by letter. A word of length
/// `L` carries `√(ħ^L · Πn)`, so it is folded with the coefficient's ħ
/// power before evaluation; this keeps `N_k` an exact integer diagonal.
pub fn realize(e: &impl Realizable, ms: &ModeSet) -> Result<MultimodeOperator, Error> {
    let hbar = ms.hbar().value();
    let cutoff = ms.per_mode_cutoff();
    let mut support = Vec::new();
    let mut compiled = Vec::new();
    for (coeff, word) in e.words() {
        let letters = word
            .iter()
            .rev()
            .map(|l| mode_index(ms, l.mode).map(|k| (k, l.kind)))
            .collect::<Result<Vec<_>, _>>()?;
        support.extend(letters.iter().map(|&(k, _)| k));
        let scale: f64 = coeff
            .terms()
            .map(|(p, r)| r.to_f64().unwrap_or(f64::NAN) * hbar_half_power(hbar, 2 * p + word.len() as i32))
            .sum();
        compiled.push((scale, letters));
    }
    support.sort_unstable();
    support.dedup();

    let d = ms.dim();
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let start = ms.occupations(col);
        'word: for (scale, letters) in &compiled {
            let mut occ = start.clone();
            let mut weight = 1.0f64;
            for &(k, kind) in letters {
                match kind {
                    LadderKind::Lower => {
                        if occ[k] == 0 {
                            continue 'word;
                        }
                        weight *= occ[k] as f64;
                        occ[k] -= 1;
                    }
                    LadderKind::Raise => {
                        if occ[k] + 1 >= cutoff {
                            continue 'word;
                        }
                        occ[k] += 1;
                        weight *= occ[k] as f64;
                    }
                }
            }
            m[(ms.index_of(&occ), col)] += C64::new(scale * weight.sqrt(), 0.0);
        }
    }
    Ok(MultimodeOperator { matrix: m, support })
}

/// Largest column norm of `a − b` over basis states with every occupation
/// at most `cutoff − 1 − degree`, where words of length ≤ `degree` never
/// reach the truncation boundary.
pub fn projected_difference(a: &CMatrix, b: &CMatrix, ms: &ModeSet, degree: usize) -> Result<f64, Error> {
    let cutoff = ms.per_mode_cutoff();
    if degree + 1 > cutoff {
        return Err(Error::DegreeExceedsCutoff { degree, cutoff });
    }
    let top = cutoff - 1 - degree;
    let diff = a - b;
    Ok((0..ms.dim())
        .filter(|&j| ms.occupations(j).iter().all(|&n| n <= top))
        .map(|j| diff.column(j).norm())
        .fold(0.0, f64::max))
}

/// `realize(e)` against `realize(normal_order(e))` on the projected subspace.
pub fn soundness_residual(e: &Expr, ms: &ModeSet) -> Result<f64, Error> {
    let raw = realize(e, ms)?;
    let ordered = realize(&normal_order(e), ms)?;
    projected_difference(&raw.matrix, &ordered.matrix, ms, e.degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use qkin_core::fock::{number_operator, HbarScale};
    use qkin_core::linalg::identity;
    use qkin_core::photon::Helicity;

    fn modes(n: usize, cutoff: usize, hbar: f64) -> ModeSet {
        let labels = (0..n).map(|k| ([1.0 + k as f64, 0.0, 0.0], Helicity::Plus));
        ModeSet::new(labels, cutoff, HbarScale::new(hbar).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn hbar_times_identity() {
        let ms = modes(2, 3, 0.7);
        let m = realize(&parse("hbar*I").unwrap(), &ms).unwrap();
        assert_eq!(m.matrix, identity(9) * C64::new(0.7, 0.0));
    }

    #[test]
    fn number_macro_is_exact() {
        for hbar in [0.3, 1.0, 2.0, 7.0] {
            let ms = modes(1, 9, hbar);
            let m = realize(&parse("N1").unwrap(), &ms).unwrap();
            assert_eq!(m.matrix, number_operator(&ms.fock()));
        }
    }

    #[test]
    fn ladders_match_mode_set() {
        let ms = modes(3, 4, 1.7);
        for k in 0..3u32 {
            let a = realize(&Expr::lower(k + 1), &ms).unwrap();
            let ad = realize(&Expr::raise(k + 1), &ms).unwrap();
            let ea = ms.annihilator(k as usize).unwrap().matrix;
            let ead = ms.creator(k as usize).unwrap().matrix;
            assert!((a.matrix - ea).camax() < 1e-15);
            assert!((ad.matrix - ead).camax() < 1e-15);
            assert_eq!(a.support, vec![k as usize]);
        }
    }

    #[test]
    fn contraction_cross_check_at_cutoff_six() {
        let ms = modes(1, 6, 1.3);
        let e = parse("a1*ad1").unwrap();
        let r = soundness_residual(&e, &ms).unwrap();
        assert!(r < 1e-12, "{r}");
        // without projection the top level shows the truncation defect
        let raw = realize(&e, &ms).unwrap().matrix;
        let ordered = realize(&normal_order(&e), &ms).unwrap().matrix;
        assert!((raw - ordered).camax() > 1.0);
    }

    #[test]
    fn quartic_word_against_brute_force() {
        for cutoff in [5, 8] {
            let ms = modes(1, cutoff, 0.9);
            let e = parse("a1*a1*ad1*ad1").unwrap();
            let a = ms.annihilator(0).unwrap().matrix;
            let ad = ms.creator(0).unwrap().matrix;
            let brute = &a * &a * &ad * &ad;
            let symbolic = realize(&normal_order(&e), &ms).unwrap().matrix;
            assert!(projected_difference(&brute, &symbolic, &ms, 4).unwrap() < 1e-12);
        }
    }

    #[test]
    fn unknown_mode() {
        let ms = modes(2, 3, 1.0);
        assert!(matches!(
            realize(&parse("a3").unwrap(), &ms),
            Err(Error::UnknownMode { mode: 3, declared: 2 })
        ));
        assert!(matches!(realize(&parse("ad0").unwrap(), &ms), Err(Error::UnknownMode { mode: 0, .. })));
    }

    #[test]
    fn degree_must_fit_cutoff() {
        let ms = modes(1, 3, 1.0);
        assert!(soundness_residual(&parse("a1^3").unwrap(), &ms).is_err());
    }
}
