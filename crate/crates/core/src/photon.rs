//! Multimode truncated photon field on a finite mode set.
//!
//! Each mode `(k, σ)` carries its own truncated Fock factor; the total space
//! is the tensor product with mode 0 as the most significant factor. The
//! continuum `δ(k − k′)` becomes a Kronecker delta between listed modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{number_operator, HbarScale, TruncatedFock};
use crate::linalg::{c, commutator, hermitian_eig, identity, kron, max_abs, CMatrix, CVector, Tolerance, C64};
use crate::modular::{cyclic_separating_check, gibbs_state, orbit_dimension, FiniteAlgebra, StandardForm};
use crate::report::{fmt_sci, CheckReport};

pub const PLANCK_ANCHOR: &str = "Planck relation E = ħω for single-quantum excitations";
pub const HAMILTONIAN_ANCHOR: &str = "mode Hamiltonian Σ ħω(N + 1/2) by symmetric ordering";
pub const HELICITY_ANCHOR: &str = "helicity Λ = Σ ħσN, spin along the propagation direction";
pub const JOINT_ANCHOR: &str = "energy and helicity read the same occupation numbers";
pub const SMEARED_ANCHOR: &str = "equal-time canonical commutator of smeared fields";
pub const VACUUM_ANCHOR: &str = "annihilators kill the Fock vacuum, so it is not separating";

pub const DEFAULT_DIMENSION_BUDGET: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            other => Err(Error::InvalidInput(format!("helicity must be +1 or -1, got {other}"))),
        }
    }

    fn as_i8(self) -> i8 {
        self.sign() as i8
    }
}

/// Field mode with the dispersion `ω = c|k|` fixed on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeLabel {
    wavevector: [f64; 3],
    helicity: Helicity,
    frequency: f64,
}

impl ModeLabel {
    pub fn new(wavevector: [f64; 3], helicity: Helicity, c_speed: f64) -> Result<Self> {
        if !(c_speed.is_finite() && c_speed > 0.0) {
            return Err(Error::NonpositiveInput("speed of light"));
        }
        if wavevector.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            wavevector,
            helicity,
            frequency: crate::scaffold::dispersion(wavevector, c_speed),
        })
    }

    pub fn wavevector(&self) -> [f64; 3] {
        self.wavevector
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Symmetric,
    Normal,
}

impl Ordering {
    fn zero_point(self) -> f64 {
        match self {
            Ordering::Symmetric => 0.5,
            Ordering::Normal => 0.0,
        }
    }
}

/// Finite list of modes, each truncated at the same cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<ModeLabel>,
    per_mode_cutoff: usize,
    hbar: HbarScale,
    c: f64,
}

impl ModeSet {
    pub fn new(
        modes: impl IntoIterator<Item = ([f64; 3], Helicity)>,
        per_mode_cutoff: usize,
        hbar: HbarScale,
        c_speed: f64,
    ) -> Result<Self> {
        Self::with_budget(modes, per_mode_cutoff, hbar, c_speed, DEFAULT_DIMENSION_BUDGET)
    }

    pub fn with_budget(
        modes: impl IntoIterator<Item = ([f64; 3], Helicity)>,
        per_mode_cutoff: usize,
        hbar: HbarScale,
        c_speed: f64,
        budget: usize,
    ) -> Result<Self> {
        if per_mode_cutoff < 2 {
            return Err(Error::CutoffTooSmall(per_mode_cutoff));
        }
        let mut labels: Vec<ModeLabel> = Vec::new();
        for (k, sigma) in modes {
            if labels.iter().any(|m| m.wavevector == k && m.helicity == sigma) {
                return Err(Error::DuplicateMode {
                    wavevector: k,
                    helicity: sigma.as_i8(),
                });
            }
            labels.push(ModeLabel::new(k, sigma, c_speed)?);
        }
        if labels.is_empty() {
            return Err(Error::InvalidInput("mode set is empty".into()));
        }
        let dimension = (0..labels.len()).try_fold(1usize, |acc, _| acc.checked_mul(per_mode_cutoff));
        match dimension {
            Some(d) if d <= budget => {}
            _ => {
                return Err(Error::DimensionBudgetExceeded {
                    dimension: dimension.unwrap_or(usize::MAX),
                    budget,
                })
            }
        }
        Ok(Self {
            modes: labels,
            per_mode_cutoff,
            hbar,
            c: c_speed,
        })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn per_mode_cutoff(&self) -> usize {
        self.per_mode_cutoff
    }

    pub fn hbar(&self) -> HbarScale {
        self.hbar
    }

    pub fn speed_of_light(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.per_mode_cutoff.pow(self.modes.len() as u32)
    }

    pub fn fock(&self) -> TruncatedFock {
        TruncatedFock::new(self.per_mode_cutoff, self.hbar).expect("cutoff validated on construction")
    }

    /// Same modes with a different ħ.
    pub fn with_hbar(&self, hbar: HbarScale) -> Self {
        Self {
            hbar,
            ..self.clone()
        }
    }

    /// Modes reordered so that new position `i` holds old mode `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.modes.len()];
        if order.len() != self.modes.len() {
            return Err(Error::LengthMismatch {
                expected: self.modes.len(),
                found: order.len(),
            });
        }
        for &i in order {
            if i >= seen.len() || seen[i] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Self {
            modes: order.iter().map(|&i| self.modes[i]).collect(),
            ..self.clone()
        })
    }

    fn check_index(&self, mode: usize) -> Result<()> {
        if mode >= self.modes.len() {
            return Err(Error::InvalidInput(format!(
                "mode index {mode} out of range for {} modes",
                self.modes.len()
            )));
        }
        Ok(())
    }

    /// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on factor `mode`.
    pub fn embed(&self, op: &CMatrix, mode: usize) -> MultimodeOperator {
        let n = self.per_mode_cutoff;
        let mut m = CMatrix::identity(1, 1);
        for k in 0..self.modes.len() {
            let factor = if k == mode { op.clone() } else { identity(n) };
            m = kron(&m, &factor);
        }
        MultimodeOperator {
            matrix: m,
            support: vec![mode],
        }
    }

    pub fn annihilator(&self, mode: usize) -> Result<MultimodeOperator> {
        self.check_index(mode)?;
        Ok(self.embed(&self.fock().annihilator(), mode))
    }

    pub fn creator(&self, mode: usize) -> Result<MultimodeOperator> {
        let a = self.annihilator(mode)?;
        Ok(MultimodeOperator {
            matrix: a.matrix.adjoint(),
            support: a.support,
        })
    }

    pub fn number(&self, mode: usize) -> Result<MultimodeOperator> {
        self.check_index(mode)?;
        Ok(self.embed(&number_operator(&self.fock()), mode))
    }

    /// Occupation tuple of a tensor-basis index.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let n = self.per_mode_cutoff;
        let mut occ = vec![0; self.modes.len()];
        for slot in occ.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        occ
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .fold(0, |acc, &n| acc * self.per_mode_cutoff + n)
    }

    pub fn basis_state(&self, occupations: &[usize]) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[self.index_of(occupations)] = c(1.0, 0.0);
        v
    }

    pub fn vacuum(&self) -> CVector {
        self.basis_state(&vec![0; self.modes.len()])
    }

    /// Diagonal projector onto states with every occupation at most
    /// `cutoff − 2`, which excludes the truncation boundary of each mode.
    pub fn interior_projector(&self) -> CMatrix {
        let top = self.per_mode_cutoff - 1;
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| {
            if i == j && self.occupations(i).iter().all(|&n| n < top) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }
}

/// Operator on the tensor-product space together with the mode factors it
/// acts on nontrivially.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeOperator {
    pub matrix: CMatrix,
    pub support: Vec<usize>,
}

impl MultimodeOperator {
    pub fn commutator_norm(&self, other: &MultimodeOperator) -> f64 {
        max_abs(&commutator(&self.matrix, &other.matrix))
    }

    pub fn disjoint_from(&self, other: &MultimodeOperator) -> bool {
        self.support.iter().all(|k| !other.support.contains(k))
    }
}

fn weighted_number_sum(ms: &ModeSet, weight: impl Fn(&ModeLabel) -> f64, offset: f64) -> MultimodeOperator {
    let d = ms.dim();
    let diag: Vec<f64> = (0..d)
        .map(|i| {
            ms.occupations(i)
                .iter()
                .zip(ms.modes())
                .map(|(&n, mode)| weight(mode) * (n as f64 + offset))
                .sum()
        })
        .collect();
    MultimodeOperator {
        matrix: crate::linalg::diag_real(&diag),
        support: (0..ms.mode_count()).collect(),
    }
}

/// `Σ ħω_k (N_k + ½)` (symmetric) or `Σ ħω_k N_k` (normal).
pub fn build_hamiltonian(ms: &ModeSet, ordering: Ordering) -> MultimodeOperator {
    let hbar = ms.hbar.value();
    let mut total = CMatrix::zeros(ms.dim(), ms.dim());
    for (k, mode) in ms.modes().iter().enumerate() {
        let n_k = ms.number(k).expect("index in range").matrix;
        let shifted = n_k + identity(ms.dim()) * c(ordering.zero_point(), 0.0);
        total += shifted * c(hbar * mode.frequency(), 0.0);
    }
    MultimodeOperator {
        matrix: total,
        support: (0..ms.mode_count()).collect(),
    }
}

/// `Λ = Σ ħσ_k N_k`.
pub fn build_helicity_operator(ms: &ModeSet) -> MultimodeOperator {
    let hbar = ms.hbar.value();
    let mut total = CMatrix::zeros(ms.dim(), ms.dim());
    for (k, mode) in ms.modes().iter().enumerate() {
        total += ms.number(k).expect("index in range").matrix * c(hbar * mode.helicity().sign(), 0.0);
    }
    MultimodeOperator {
        matrix: total,
        support: (0..ms.mode_count()).collect(),
    }
}

/// `ħω_k`.
pub fn single_photon_energy(ms: &ModeSet, mode: usize) -> Result<f64> {
    ms.check_index(mode)?;
    Ok(ms.hbar.value() * ms.modes[mode].frequency())
}

/// Energies `Σ ħω_k(n_k + offset)` of every occupation tuple, sorted.
pub fn occupation_energies(ms: &ModeSet, ordering: Ordering) -> Vec<f64> {
    let hbar = ms.hbar.value();
    let op = weighted_number_sum(ms, |m| hbar * m.frequency(), ordering.zero_point());
    let mut e: Vec<f64> = op.matrix.diagonal().iter().map(|z| z.re).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Largest gap between the numerically diagonalized Hamiltonian spectrum
/// and the occupation-tuple energies.
pub fn hamiltonian_spectrum_deviation(ms: &ModeSet, ordering: Ordering) -> Result<f64> {
    let h = build_hamiltonian(ms, ordering);
    let spec = hermitian_eig(&h.matrix, Tolerance::default())?;
    let expected = occupation_energies(ms, ordering);
    Ok(spec
        .values
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Largest failure of `H` and `Λ` to be simultaneously diagonal and to equal
/// `Σ ħω_k n_k`, `Σ ħσ_k n_k` on the occupation readouts `n_k = ⟨n|N_k|n⟩`.
pub fn joint_quantization_residual(ms: &ModeSet, h: &CMatrix, lambda: &CMatrix) -> Result<f64> {
    let d = ms.dim();
    if h.nrows() != d || lambda.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h.nrows().max(lambda.nrows()),
        });
    }
    let hbar = ms.hbar.value();
    let numbers: Vec<CMatrix> = (0..ms.mode_count())
        .map(|k| ms.number(k).map(|op| op.matrix))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                worst = worst.max(h[(i, j)].norm()).max(lambda[(i, j)].norm());
            }
        }
        let readout: Vec<f64> = numbers.iter().map(|n| n[(i, i)].re).collect();
        let energy: f64 = readout
            .iter()
            .zip(ms.modes())
            .map(|(n, m)| hbar * m.frequency() * n)
            .sum();
        let helicity: f64 = readout
            .iter()
            .zip(ms.modes())
            .map(|(n, m)| hbar * m.helicity().sign() * n)
            .sum();
        worst = worst
            .max((h[(i, i)] - c(energy, 0.0)).norm())
            .max((lambda[(i, i)] - c(helicity, 0.0)).norm());
    }
    Ok(worst)
}

pub fn joint_quantization_check(ms: &ModeSet, tol: Tolerance) -> CheckReport {
    let h = build_hamiltonian(ms, Ordering::Normal);
    let lambda = build_helicity_operator(ms);
    let scale = max_abs(&h.matrix).max(max_abs(&lambda.matrix));
    let residual = joint_quantization_residual(ms, &h.matrix, &lambda.matrix).unwrap_or(f64::INFINITY);
    CheckReport::new(
        format!("photon.joint_quantization.modes{}", ms.mode_count()),
        JOINT_ANCHOR,
        residual,
        tol.bound(scale),
    )
    .with_note("commutator_H_Lambda", fmt_sci(h.commutator_norm(&lambda)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldForm {
    PsiPsiDagger,
    PhiPi,
}

/// Smeared field operators built from per-mode coefficients.
pub struct SmearedFields<'a> {
    ms: &'a ModeSet,
    a: Vec<CMatrix>,
}

impl<'a> SmearedFields<'a> {
    pub fn new(ms: &'a ModeSet) -> Self {
        let a = (0..ms.mode_count())
            .map(|k| ms.annihilator(k).expect("index in range").matrix)
            .collect();
        Self { ms, a }
    }

    fn check_len(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.a.len() {
            return Err(Error::LengthMismatch {
                expected: self.a.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// `ψ(f) = Σ conj(f_k) a_k`.
    pub fn psi(&self, f: &[C64]) -> Result<CMatrix> {
        self.check_len(f)?;
        let mut out = CMatrix::zeros(self.ms.dim(), self.ms.dim());
        for (fk, ak) in f.iter().zip(&self.a) {
            out += ak * fk.conj();
        }
        Ok(out)
    }

    pub fn psi_dagger(&self, f: &[C64]) -> Result<CMatrix> {
        Ok(self.psi(f)?.adjoint())
    }

    /// `φ(f) = Σ (conj(f_k) a_k + f_k a†_k)/√2`, the position quadrature for real `f`.
    pub fn phi(&self, f: &[C64]) -> Result<CMatrix> {
        let psi = self.psi(f)?;
        Ok((&psi + psi.adjoint()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    /// `π(g) = i Σ (g_k a†_k − conj(g_k) a_k)/√2`.
    pub fn pi(&self, g: &[C64]) -> Result<CMatrix> {
        let psi = self.psi(g)?;
        Ok((psi.adjoint() - &psi) * c(0.0, std::f64::consts::FRAC_1_SQRT_2))
    }
}

/// `(f, g) = Σ conj(f_k) g_k`.
pub fn mode_inner(f: &[C64], g: &[C64]) -> C64 {
    f.iter().zip(g).map(|(a, b)| a.conj() * b).sum()
}

/// Projected commutator defect of the smeared fields: ψ-form compares
/// `[ψ(f), ψ†(g)]` with `ħ(f,g)`, φ-form compares `[φ(f), π(g)]` with
/// `iħ Re(f,g)` (which is `iħ(f,g)` for real coefficients).
pub fn smeared_field_defect(ms: &ModeSet, f: &[C64], g: &[C64], form: FieldForm) -> Result<f64> {
    let fields = SmearedFields::new(ms);
    let hbar = ms.hbar.value();
    let inner = mode_inner(f, g);
    let (comm, expected) = match form {
        FieldForm::PsiPsiDagger => (
            commutator(&fields.psi(f)?, &fields.psi_dagger(g)?),
            inner * hbar,
        ),
        FieldForm::PhiPi => (
            commutator(&fields.phi(f)?, &fields.pi(g)?),
            c(0.0, hbar * inner.re),
        ),
    };
    let p = ms.interior_projector();
    let defect = &p * (comm - identity(ms.dim()) * expected) * &p;
    Ok(max_abs(&defect))
}

pub fn smeared_field_ccr(ms: &ModeSet, f: &[C64], g: &[C64], form: FieldForm, tol: Tolerance) -> Result<CheckReport> {
    let defect = smeared_field_defect(ms, f, g, form)?;
    let scale = ms.hbar.value() * mode_inner(f, f).re.sqrt() * mode_inner(g, g).re.sqrt();
    let name = match form {
        FieldForm::PsiPsiDagger => "photon.smeared_ccr.psi",
        FieldForm::PhiPi => "photon.smeared_ccr.phi_pi",
    };
    Ok(CheckReport::new(name, SMEARED_ANCHOR, defect, tol.bound(scale.max(ms.hbar.value()))))
}

/// Findings of the vacuum cyclic/separating diagnostic.
#[derive(Debug, Clone)]
pub struct VacuumDiagnostic {
    /// Mode whose annihilator is the witness.
    pub witness_mode: usize,
    pub witness: CMatrix,
    pub witness_norm: f64,
    /// `‖a_k Ω₀‖`, zero for the Fock vacuum.
    pub annihilated_norm: f64,
    /// `‖(a_k + a_k†) Ω₀‖ = √ħ`.
    pub hermitian_combination_norm: f64,
    pub separating: bool,
    pub cyclic: bool,
    /// Separating status of `vec(ρ^{1/2})` for the ladder algebra doubled
    /// onto `H ⊗ H`, with `ρ` the full-rank thermal state at `β = 1/(ħω_min)`;
    /// computed when the single-copy dimension is at most
    /// [`RESTORATION_DIM_LIMIT`].
    pub restored_separating: Option<bool>,
}

pub const RESTORATION_DIM_LIMIT: usize = 8;

impl VacuumDiagnostic {
    pub fn report(&self, ms: &ModeSet) -> CheckReport {
        // the check asserts the obstruction: a nonzero annihilator with aΩ₀ = 0
        let holds = !self.separating && self.witness_norm > 0.0 && self.annihilated_norm == 0.0;
        CheckReport::predicate(
            format!("photon.vacuum_not_separating.modes{}.cutoff{}", ms.mode_count(), ms.per_mode_cutoff()),
            VACUUM_ANCHOR,
            holds,
        )
        .with_note("witness", format!("a_{}", self.witness_mode))
        .with_note("witness_norm", fmt_sci(self.witness_norm))
        .with_note("annihilated_norm", fmt_sci(self.annihilated_norm))
        .with_note("hermitian_combination_norm", fmt_sci(self.hermitian_combination_norm))
        .with_note("cyclic_for_ladder_algebra", self.cyclic)
        .with_note(
            "full_rank_vector_separating",
            self.restored_separating
                .map(|b| b.to_string())
                .unwrap_or_else(|| "skipped".into()),
        )
    }
}

pub fn vacuum_separating_diagnostic(ms: &ModeSet) -> Result<VacuumDiagnostic> {
    let omega = ms.vacuum();
    let a = ms.annihilator(0)?.matrix;
    let witness_norm = crate::linalg::operator_norm(&a);
    let annihilated_norm = (&a * &omega).norm();
    let hermitian_combination_norm = ((&a + a.adjoint()) * &omega).norm();
    let mut generators = Vec::new();
    for k in 0..ms.mode_count() {
        let ak = ms.annihilator(k)?.matrix;
        generators.push(ak.adjoint());
        generators.push(ak);
    }
    let cyclic = orbit_dimension(&generators, &omega, 1e-10) == ms.dim();
    let restored_separating = if ms.dim() <= RESTORATION_DIM_LIMIT {
        Some(full_rank_restoration(ms, &generators)?)
    } else {
        None
    };
    Ok(VacuumDiagnostic {
        witness_mode: 0,
        witness: a,
        witness_norm,
        annihilated_norm,
        hermitian_combination_norm,
        separating: annihilated_norm > 0.0 || witness_norm == 0.0,
        cyclic,
        restored_separating,
    })
}

fn full_rank_restoration(ms: &ModeSet, generators: &[CMatrix]) -> Result<bool> {
    let omega_min = ms
        .modes()
        .iter()
        .map(ModeLabel::frequency)
        .fold(f64::INFINITY, f64::min);
    let h = build_hamiltonian(ms, Ordering::Normal).matrix;
    let beta = 1.0 / (ms.hbar.value() * omega_min.max(1e-12));
    let rho = gibbs_state(&h, beta)?;
    let sf = StandardForm::new(&rho)?;
    let id = identity(ms.dim());
    let lifted: Vec<CMatrix> = generators.iter().map(|g| kron(g, &id)).collect();
    let alg = FiniteAlgebra::generate(lifted)?;
    Ok(cyclic_separating_check(&alg, &sf.omega)?.separating)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::random::{random_real_vector, seeded};
    use rand::Rng;

    fn hbar(v: f64) -> HbarScale {
        HbarScale::new(v).unwrap()
    }

    fn single(omega: f64, sigma: Helicity, cutoff: usize, h: f64) -> ModeSet {
        ModeSet::new([([omega, 0.0, 0.0], sigma)], cutoff, hbar(h), 1.0).unwrap()
    }

    fn eigenvalues(m: &CMatrix) -> Vec<f64> {
        hermitian_eig(m, Tolerance::default()).unwrap().values
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn mode_set_validation() {
        let k = [1.0, 0.0, 0.0];
        let dup = ModeSet::new([(k, Helicity::Plus), (k, Helicity::Plus)], 2, hbar(1.0), 1.0);
        assert!(matches!(dup, Err(Error::DuplicateMode { .. })));
        assert!(ModeSet::new([(k, Helicity::Plus), (k, Helicity::Minus)], 2, hbar(1.0), 1.0).is_ok());
        let big = ModeSet::new((0..7).map(|i| ([i as f64 + 1.0, 0.0, 0.0], Helicity::Plus)), 4, hbar(1.0), 1.0);
        assert!(matches!(big, Err(Error::DimensionBudgetExceeded { dimension: 16384, budget: 4096 })));
        assert!(Helicity::from_sign(0).is_err());
    }

    #[test]
    fn dispersion_enforced() {
        let ms = ModeSet::new([([3.0, 4.0, 0.0], Helicity::Plus)], 2, hbar(1.0), 2.0).unwrap();
        assert_eq!(ms.modes()[0].frequency(), 10.0);
    }

    #[test]
    fn symmetric_single_mode_spectrum() {
        let ms = single(1.0, Helicity::Plus, 4, 1.0);
        let e = eigenvalues(&build_hamiltonian(&ms, Ordering::Symmetric).matrix);
        assert_close(&e, &[0.5, 1.5, 2.5, 3.5], 1e-14);
    }

    #[test]
    fn normal_single_mode_spectrum() {
        let ms = single(1.0, Helicity::Plus, 4, 1.0);
        let e = eigenvalues(&build_hamiltonian(&ms, Ordering::Normal).matrix);
        assert_close(&e, &[0.0, 1.0, 2.0, 3.0], 1e-14);
    }

    #[test]
    fn two_mode_normal_spectrum() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 2.0, 0.0], Helicity::Plus)],
            2,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        let e = eigenvalues(&build_hamiltonian(&ms, Ordering::Normal).matrix);
        // n1·1 + n2·2 over n ∈ {0,1}²
        assert_close(&e, &[0.0, 1.0, 2.0, 3.0], 1e-14);
    }

    #[test]
    fn single_photon_energy_matches_gap() {
        let ms = single(2.0, Helicity::Plus, 3, 1.0);
        assert_eq!(single_photon_energy(&ms, 0).unwrap(), 2.0);
        for ordering in [Ordering::Symmetric, Ordering::Normal] {
            let e = eigenvalues(&build_hamiltonian(&ms, ordering).matrix);
            assert!((e[1] - e[0] - 2.0).abs() < 1e-14);
        }
        let doubled = ms.with_hbar(hbar(2.0));
        assert_eq!(single_photon_energy(&doubled, 0).unwrap(), 4.0);
        assert!(single_photon_energy(&ms, 3).is_err());
    }

    #[test]
    fn green_light_photon_energy_si() {
        let constants = crate::constants::PhysicalConstants::si();
        let omega = 2.0 * std::f64::consts::PI * 5e14;
        let k = omega / constants.c;
        let ms = ModeSet::new([([k, 0.0, 0.0], Helicity::Plus)], 2, hbar(constants.hbar), constants.c).unwrap();
        let e = single_photon_energy(&ms, 0).unwrap();
        // ħω = 1.054571817e-34 · 3.14159265e15
        assert!((e - 3.313e-19).abs() < 1e-22, "{e}");
    }

    #[test]
    fn helicity_eigenvalues() {
        for (sigma, h, expected) in [(Helicity::Plus, 1.0, 1.0), (Helicity::Minus, 1.0, -1.0), (Helicity::Minus, 2.5, -2.5)] {
            let ms = single(1.0, sigma, 3, h);
            let lambda = build_helicity_operator(&ms);
            let one = ms.basis_state(&[1]);
            let out = &lambda.matrix * &one;
            assert!((out - &one * c(expected, 0.0)).norm() < 1e-15);
        }
        let ms = single(1.0, Helicity::Plus, 3, 1.0);
        let two = ms.basis_state(&[2]);
        let out = &build_helicity_operator(&ms).matrix * &two;
        assert!((out - &two * c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_commutes_with_helicity() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 0.0, 2.0], Helicity::Minus)],
            3,
            hbar(0.7),
            1.0,
        )
        .unwrap();
        let h = build_hamiltonian(&ms, Ordering::Symmetric);
        let l = build_helicity_operator(&ms);
        assert_eq!(h.commutator_norm(&l), 0.0);
    }

    #[test]
    fn joint_quantization_and_negative_control() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([1.0, 0.0, 0.0], Helicity::Minus)],
            3,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        assert!(joint_quantization_check(&ms, Tolerance::default()).passed);
        let mut h = build_hamiltonian(&ms, Ordering::Normal).matrix;
        h += ms.number(0).unwrap().matrix * c(0.05, 0.0);
        let lambda = build_helicity_operator(&ms).matrix;
        assert!(joint_quantization_residual(&ms, &h, &lambda).unwrap() > 1e-3);
    }

    #[test]
    fn single_mode_h_and_lambda_share_eigenvectors() {
        let ms = single(1.5, Helicity::Minus, 5, 1.0);
        let h = build_hamiltonian(&ms, Ordering::Normal).matrix;
        let n = ms.number(0).unwrap().matrix;
        let lambda = build_helicity_operator(&ms).matrix;
        assert_eq!(h, &n * c(1.5, 0.0));
        assert_eq!(lambda, &n * c(-1.0, 0.0));
    }

    #[test]
    fn disjoint_mode_operators_commute() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 1.0, 0.0], Helicity::Plus), ([0.0, 0.0, 1.0], Helicity::Minus)],
            3,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        let a0 = ms.annihilator(0).unwrap();
        let ad2 = ms.creator(2).unwrap();
        assert!(a0.disjoint_from(&ad2));
        assert_eq!(a0.commutator_norm(&ad2), 0.0);
    }

    #[test]
    fn psi_form_single_mode_and_orthogonal() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 1.0, 0.0], Helicity::Plus)],
            4,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        let one = [c(1.0, 0.0), c(0.0, 0.0)];
        let other = [c(0.0, 0.0), c(1.0, 0.0)];
        assert!(smeared_field_defect(&ms, &one, &one, FieldForm::PsiPsiDagger).unwrap() < 1e-14);
        assert!(smeared_field_defect(&ms, &one, &other, FieldForm::PsiPsiDagger).unwrap() < 1e-15);
        let bad = [c(1.0, 0.0)];
        assert!(matches!(
            smeared_field_defect(&ms, &bad, &one, FieldForm::PsiPsiDagger),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn random_smeared_fields_three_modes() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 1.0, 0.0], Helicity::Minus), ([0.0, 0.0, 1.0], Helicity::Plus)],
            3,
            hbar(0.8),
            1.0,
        )
        .unwrap();
        let mut rng = seeded(11);
        let f: Vec<C64> = (0..3).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let g: Vec<C64> = (0..3).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        // independent expansion of the double sum Σ_jk conj(f_j) g_k [a_j, a_k†]
        let a: Vec<CMatrix> = (0..3).map(|k| ms.annihilator(k).unwrap().matrix).collect();
        let mut direct = CMatrix::zeros(ms.dim(), ms.dim());
        for j in 0..3 {
            for k in 0..3 {
                direct += commutator(&a[j], &a[k].adjoint()) * (f[j].conj() * g[k]);
            }
        }
        let p = ms.interior_projector();
        let expected = mode_inner(&f, &g) * 0.8;
        assert!(max_abs(&(&p * (direct - identity(ms.dim()) * expected) * &p)) < 1e-12);
        assert!(smeared_field_defect(&ms, &f, &g, FieldForm::PsiPsiDagger).unwrap() < 1e-12);

        let fr: Vec<C64> = random_real_vector(3, &mut rng).into_iter().map(|x| c(x, 0.0)).collect();
        let gr: Vec<C64> = random_real_vector(3, &mut rng).into_iter().map(|x| c(x, 0.0)).collect();
        assert!(smeared_field_defect(&ms, &fr, &gr, FieldForm::PhiPi).unwrap() < 1e-12);
    }

    #[test]
    fn vacuum_is_not_separating() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 1.0, 0.0], Helicity::Minus)],
            4,
            hbar(2.0),
            1.0,
        )
        .unwrap();
        let d = vacuum_separating_diagnostic(&ms).unwrap();
        assert!(!d.separating);
        assert_eq!(d.annihilated_norm, 0.0);
        assert!((d.witness_norm - (2.0f64 * 3.0).sqrt()).abs() < 1e-12);
        assert!((d.hermitian_combination_norm - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(d.cyclic);
        assert_eq!(d.restored_separating, None);
        assert!(d.report(&ms).passed);
        let small = single(1.0, Helicity::Plus, 3, 1.0);
        let d = vacuum_separating_diagnostic(&small).unwrap();
        assert!(!d.separating);
        assert_eq!(d.restored_separating, Some(true));
    }

    #[test]
    fn spectra_scale_linearly_with_hbar() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 3.0, 0.0], Helicity::Minus)],
            3,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        let scaled = ms.with_hbar(hbar(3.0));
        let e1 = eigenvalues(&build_hamiltonian(&ms, Ordering::Symmetric).matrix);
        let e3 = eigenvalues(&build_hamiltonian(&scaled, Ordering::Symmetric).matrix);
        let l1 = eigenvalues(&build_helicity_operator(&ms).matrix);
        let l3 = eigenvalues(&build_helicity_operator(&scaled).matrix);
        for (a, b) in e1.iter().zip(&e3).chain(l1.iter().zip(&l3)) {
            assert!((3.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectra_invariant_under_mode_permutation() {
        let ms = ModeSet::new(
            [([1.0, 0.0, 0.0], Helicity::Plus), ([0.0, 2.0, 0.0], Helicity::Minus), ([0.0, 0.0, 0.5], Helicity::Plus)],
            3,
            hbar(1.0),
            1.0,
        )
        .unwrap();
        let perm = ms.permuted(&[2, 0, 1]).unwrap();
        let a = eigenvalues(&build_hamiltonian(&ms, Ordering::Normal).matrix);
        let b = eigenvalues(&build_hamiltonian(&perm, Ordering::Normal).matrix);
        assert_close(&a, &b, 1e-12);
        let a = eigenvalues(&build_helicity_operator(&ms).matrix);
        let b = eigenvalues(&build_helicity_operator(&perm).matrix);
        assert_close(&a, &b, 1e-12);
        assert!(ms.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn number_form_nonnegative_on_random_vectors() {
        let ms = single(1.0, Helicity::Plus, 6, 1.0);
        let n = ms.number(0).unwrap().matrix;
        let mut rng = seeded(4);
        for _ in 0..20 {
            let v = crate::random::random_vector(6, &mut rng);
            assert!(v.dotc(&(&n * &v)).re >= 0.0);
        }
        let _ = rng.random::<u8>();
    }
}
