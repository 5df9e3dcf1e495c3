//! Single-mode truncated Fock space with an explicit ħ scale, Weyl operators,
//! and the grid-Schrödinger intertwiner check.
//!
//! Ladder operators carry ħ in their matrix elements, `⟨n−1|a|n⟩ = √(ħn)`, so
//! that `[a, a†] = ħ` below the truncation boundary. Quadratures are
//! `q̂ = (a + a†)/√2` and `p̂ = i(a† − a)/√2`, which gives `[q̂, p̂] = iħ`.

use std::sync::Arc;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, identity, mat_exp, max_abs, CMatrix, CVector, Tolerance, C64};
use crate::report::{fmt_sci, CheckReport};

pub const CCR_ANCHOR: &str = "canonical commutator [a, a†] = ħ on the Fock representation";
pub const NUMBER_ANCHOR: &str = "integer spectrum of the number operator";
pub const WEYL_ANCHOR: &str = "Weyl relations W(ξ)W(η) = phase·W(ξ+η), W(ξ)* = W(−ξ), W(0) = 1";
pub const SVN_ANCHOR: &str = "Stone–von Neumann uniqueness of irreducible regular representations";

/// Orthonormality error above which a grid is said to under-resolve the
/// oscillator states.
pub const GRID_RESOLUTION_BOUND: f64 = 1e-6;

/// The single quantum of action threaded through every operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbarScale(f64);

impl HbarScale {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonpositiveInput("hbar"));
        }
        Ok(Self(value))
    }

    pub const fn natural() -> Self {
        Self(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(self.0 * factor)
    }
}

/// States `|0⟩ … |cutoff−1⟩` of one bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedFock {
    cutoff: usize,
    hbar: HbarScale,
}

impl TruncatedFock {
    pub fn new(cutoff: usize, hbar: HbarScale) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        Ok(Self { cutoff, hbar })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff
    }

    pub fn hbar(&self) -> HbarScale {
        self.hbar
    }

    pub fn basis_state(&self, n: usize) -> CVector {
        let mut v = CVector::zeros(self.cutoff);
        v[n] = c(1.0, 0.0);
        v
    }

    pub fn vacuum(&self) -> CVector {
        self.basis_state(0)
    }

    /// Projector onto `|0⟩ … |keep−1⟩`.
    pub fn low_projector(&self, keep: usize) -> CMatrix {
        CMatrix::from_fn(self.cutoff, self.cutoff, |i, j| {
            if i == j && i < keep {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    pub fn annihilator(&self) -> CMatrix {
        let h = self.hbar.value();
        CMatrix::from_fn(self.cutoff, self.cutoff, |i, j| {
            if j == i + 1 {
                c((h * j as f64).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    pub fn quadratures(&self) -> FockQuadratures {
        let a = self.annihilator();
        let ad = a.adjoint();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        FockQuadratures {
            q: (&a + &ad) * c(s, 0.0),
            p: (&ad - &a) * c(0.0, s),
            hbar: self.hbar,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: CMatrix,
    pub a_dagger: CMatrix,
}

pub fn build_ladder(fock: &TruncatedFock) -> Ladder {
    let a = fock.annihilator();
    let a_dagger = a.adjoint();
    Ladder { a, a_dagger }
}

/// `N = a†a/ħ`, built directly as `diag(0, 1, …, cutoff−1)`.
pub fn number_operator(fock: &TruncatedFock) -> CMatrix {
    CMatrix::from_fn(fock.cutoff, fock.cutoff, |i, j| {
        if i == j {
            c(i as f64, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Largest entry of `[a, a†] − ħ`, optionally with the top Fock level
/// projected out.
pub fn ccr_defect(fock: &TruncatedFock, projected: bool) -> f64 {
    let ladder = build_ladder(fock);
    let defect = commutator(&ladder.a, &ladder.a_dagger) - identity(fock.dim()) * c(fock.hbar.value(), 0.0);
    if projected {
        let p = fock.low_projector(fock.cutoff - 1);
        max_abs(&(&p * defect * &p))
    } else {
        max_abs(&defect)
    }
}

pub fn check_ccr(fock: &TruncatedFock, tol: Tolerance) -> CheckReport {
    let error = ccr_defect(fock, true);
    let hbar = fock.hbar.value();
    CheckReport::new(
        format!("fock.ccr.cutoff{}", fock.cutoff),
        CCR_ANCHOR,
        error,
        tol.bound(hbar),
    )
    .with_note("hbar", hbar)
    .with_note("boundary_defect", fmt_sci(ccr_defect(fock, false)))
}

/// Anything providing a canonical pair `(q̂, p̂)` with `[q̂, p̂] ≈ iħ`.
pub trait CanonicalPair {
    fn position(&self) -> &CMatrix;
    fn momentum(&self) -> &CMatrix;
    fn hbar(&self) -> HbarScale;

    fn dim(&self) -> usize {
        self.position().nrows()
    }
}

#[derive(Debug, Clone)]
pub struct FockQuadratures {
    pub q: CMatrix,
    pub p: CMatrix,
    pub hbar: HbarScale,
}

impl CanonicalPair for FockQuadratures {
    fn position(&self) -> &CMatrix {
        &self.q
    }

    fn momentum(&self) -> &CMatrix {
        &self.p
    }

    fn hbar(&self) -> HbarScale {
        self.hbar
    }
}

/// Phase-space vector `ξ = (a, b)` labelling `W(ξ) = exp(i(a q̂ + b p̂)/ħ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub a: f64,
    pub b: f64,
}

impl PhaseVector {
    pub const ZERO: Self = Self { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `σ((a,b),(a',b')) = a b' − a' b`.
    pub fn symplectic(&self, other: &PhaseVector) -> f64 {
        self.a * other.b - other.a * self.b
    }

    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

impl std::ops::Add for PhaseVector {
    type Output = PhaseVector;

    fn add(self, rhs: PhaseVector) -> PhaseVector {
        PhaseVector::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl std::ops::Neg for PhaseVector {
    type Output = PhaseVector;

    fn neg(self) -> PhaseVector {
        PhaseVector::new(-self.a, -self.b)
    }
}

pub fn weyl_operator(rep: &impl CanonicalPair, xi: PhaseVector) -> Result<CMatrix> {
    let generator = rep.position() * c(xi.a, 0.0) + rep.momentum() * c(xi.b, 0.0);
    mat_exp(&generator, c(0.0, 1.0 / rep.hbar().value()))
}

/// Phase in `W(ξ)W(η) = phase · W(ξ+η)` for `W(ξ) = exp(i(a q̂ + b p̂)/ħ)`,
/// fixed by Baker–Campbell–Hausdorff: `exp(−iσ(ξ,η)/(2ħ))`.
pub fn weyl_phase(xi: &PhaseVector, eta: &PhaseVector, hbar: HbarScale) -> C64 {
    c(0.0, -xi.symplectic(eta) / (2.0 * hbar.value())).exp()
}

fn max_column_norm(m: &CMatrix, columns: usize) -> f64 {
    (0..columns.min(m.ncols()))
        .map(|j| m.column(j).norm())
        .fold(0.0, f64::max)
}

/// Weyl-relation residual restricted to the first `keep` basis vectors:
/// `max_j ‖(W(ξ)W(η) − phase·W(ξ+η)) e_j‖`.
pub fn weyl_relation_residual(
    rep: &impl CanonicalPair,
    xi: PhaseVector,
    eta: PhaseVector,
    keep: usize,
) -> Result<f64> {
    let lhs = weyl_operator(rep, xi)? * weyl_operator(rep, eta)?;
    let rhs = weyl_operator(rep, xi + eta)? * weyl_phase(&xi, &eta, rep.hbar());
    Ok(max_column_norm(&(lhs - rhs), keep))
}

/// `max_j ‖(W(ξ)W(−ξ) − 1) e_j‖` over all basis vectors.
pub fn weyl_inverse_residual(rep: &impl CanonicalPair, xi: PhaseVector) -> Result<f64> {
    let prod = weyl_operator(rep, xi)? * weyl_operator(rep, -xi)?;
    Ok(max_column_norm(&(prod - identity(rep.dim())), rep.dim()))
}

/// Worst Weyl-relation residual over `pairs` on a Fock truncation, measured
/// on the lower half of the Fock ladder.
pub fn weyl_fock_residual(fock: &TruncatedFock, pairs: &[(PhaseVector, PhaseVector)]) -> Result<f64> {
    let quad = fock.quadratures();
    let keep = fock.cutoff / 2;
    pairs.iter().try_fold(0.0f64, |acc, (xi, eta)| {
        Ok(acc.max(weyl_relation_residual(&quad, *xi, *eta, keep)?))
    })
}

/// Position grid with spectral momentum, `x_j = −L/2 + j·L/points`.
#[derive(Debug, Clone)]
pub struct GridRep {
    points: usize,
    length: f64,
    hbar: HbarScale,
    x: Vec<f64>,
    q_op: CMatrix,
    p_op: CMatrix,
}

impl GridRep {
    pub fn new(points: usize, length: f64, hbar: HbarScale) -> Result<Self> {
        if points < 4 || points % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "grid needs an even number of points >= 4, got {points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::NonpositiveInput("grid length"));
        }
        let dx = length / points as f64;
        let x: Vec<f64> = (0..points).map(|j| -length / 2.0 + j as f64 * dx).collect();
        let q_op = crate::linalg::diag_real(&x);
        let d = spectral_derivative_matrix(points, length);
        let p_op = d * c(0.0, -hbar.value());
        Ok(Self {
            points,
            length,
            hbar,
            x,
            q_op,
            p_op,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.x
    }

    /// Harmonic-oscillator eigenfunctions (unit mass and frequency) sampled
    /// on the grid and weighted by `√dx`; one column per state.
    pub fn oscillator_states(&self, n_states: usize) -> CMatrix {
        let h = self.hbar.value();
        let weight = self.dx().sqrt();
        let mut out = CMatrix::zeros(self.points, n_states);
        for (j, &x) in self.x.iter().enumerate() {
            for (n, value) in hermite_functions(x / h.sqrt(), n_states).into_iter().enumerate() {
                out[(j, n)] = c(value * weight / h.powf(0.25), 0.0);
            }
        }
        out
    }

    /// `(q̂ + i p̂)/√(2ħ)`.
    pub fn dimensionless_annihilator(&self) -> CMatrix {
        (&self.q_op + &self.p_op * c(0.0, 1.0)) / c((2.0 * self.hbar.value()).sqrt(), 0.0)
    }
}

impl CanonicalPair for GridRep {
    fn position(&self) -> &CMatrix {
        &self.q_op
    }

    fn momentum(&self) -> &CMatrix {
        &self.p_op
    }

    fn hbar(&self) -> HbarScale {
        self.hbar
    }
}

/// Hermite functions `ψ_0 … ψ_{n−1}` at `ξ` via the three-term recurrence.
pub fn hermite_functions(xi: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-xi * xi / 2.0).exp();
    out.push(psi0);
    if n > 1 {
        out.push(std::f64::consts::SQRT_2 * xi * psi0);
    }
    for k in 2..n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * xi * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

/// Fourier differentiation matrix on a periodic grid; the Nyquist mode is
/// dropped so the matrix is real and antisymmetric.
pub fn spectral_derivative_matrix(points: usize, length: f64) -> CMatrix {
    let mut planner = FftPlanner::<f64>::new();
    let fft: Arc<dyn rustfft::Fft<f64>> = planner.plan_fft_forward(points);
    let ifft = planner.plan_fft_inverse(points);
    let k = angular_wavenumbers(points, length);
    let mut d = CMatrix::zeros(points, points);
    let mut buf = vec![c(0.0, 0.0); points];
    for col in 0..points {
        buf.iter_mut().for_each(|z| *z = c(0.0, 0.0));
        buf[col] = c(1.0, 0.0);
        fft.process(&mut buf);
        for (z, &kk) in buf.iter_mut().zip(&k) {
            *z *= c(0.0, kk);
        }
        buf[points / 2] = c(0.0, 0.0);
        ifft.process(&mut buf);
        for (row, z) in buf.iter().enumerate() {
            d[(row, col)] = c(z.re / points as f64, 0.0);
        }
    }
    d
}

/// `2π·fftfreq(points, dx)`.
pub fn angular_wavenumbers(points: usize, length: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / length;
    (0..points)
        .map(|j| {
            let signed = if j < points.div_ceil(2) { j as f64 } else { j as f64 - points as f64 };
            base * signed
        })
        .collect()
}

/// Outcome of the grid↔Fock intertwiner comparison.
#[derive(Debug, Clone, Copy)]
pub struct IntertwinerResidual {
    pub max_error: f64,
    pub orthonormality_error: f64,
}

/// `max_n ‖(U a_grid U† − ã_fock)|n⟩‖` over the first `n_states` levels, with
/// `U = Σ |n⟩⟨ψ_n|` and `ã = a/√ħ`.
pub fn svn_intertwiner_residual(fock: &TruncatedFock, grid: &GridRep, n_states: usize) -> Result<IntertwinerResidual> {
    if fock.hbar() != grid.hbar {
        return Err(Error::InvalidInput(
            "Fock and grid representations use different hbar".into(),
        ));
    }
    if n_states == 0 || n_states > fock.cutoff() {
        return Err(Error::InvalidInput(format!(
            "n_states must be in 1..={}, got {n_states}",
            fock.cutoff()
        )));
    }
    let v = grid.oscillator_states(n_states);
    let orthonormality_error = max_abs(&(v.adjoint() * &v - identity(n_states)));
    if orthonormality_error > GRID_RESOLUTION_BOUND {
        return Err(Error::GridUnderResolved { orthonormality_error });
    }
    let a_grid = grid.dimensionless_annihilator();
    let a_fock = fock.annihilator() / c(fock.hbar().value().sqrt(), 0.0);
    let mut max_error = 0.0f64;
    for n in 0..n_states {
        let moved = &a_grid * v.column(n);
        let coords = v.adjoint() * moved;
        let mut image = CVector::zeros(fock.cutoff());
        image.rows_mut(0, n_states).copy_from(&coords);
        let expected = a_fock.column(n);
        max_error = max_error.max((image - expected).norm());
    }
    Ok(IntertwinerResidual {
        max_error,
        orthonormality_error,
    })
}

pub fn svn_intertwiner_check(fock: &TruncatedFock, grid: &GridRep, n_states: usize, tol: Tolerance) -> Result<CheckReport> {
    let r = svn_intertwiner_residual(fock, grid, n_states)?;
    Ok(CheckReport::new(
        format!("fock.svn_intertwiner.points{}", grid.points()),
        SVN_ANCHOR,
        r.max_error,
        tol.bound(1.0),
    )
    .with_note("points", grid.points())
    .with_note("length", grid.length())
    .with_note("n_states", n_states)
    .with_note("orthonormality_error", fmt_sci(r.orthonormality_error)))
}

/// Overlap between the sampled Gaussian ground state and the numerically
/// computed ground state of `(p̂² + q̂²)/2` on the grid.
pub fn grid_vacuum_overlap(grid: &GridRep) -> Result<f64> {
    let h = (&grid.p_op * &grid.p_op + &grid.q_op * &grid.q_op) * c(0.5, 0.0);
    let spec = crate::linalg::hermitian_eig(&h, Tolerance::new(1e-9, 1e-12))?;
    let ground = spec.vectors.column(0).into_owned();
    let sampled = grid.oscillator_states(1).column(0).into_owned();
    Ok(sampled.dotc(&ground).norm())
}
