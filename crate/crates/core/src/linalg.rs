//! Dense complex linear algebra shared by every other module.
//!
//! Matrix functions of (anti-)Hermitian inputs go through a Hermitian
//! eigendecomposition so that unitarity and positivity hold to machine
//! precision; a scaling-and-squaring Taylor series covers the general case
//! and serves as the independent route in cross-checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues below this fraction of the largest one are treated as zero
/// when taking complex powers.
pub const POSITIVITY_FLOOR: f64 = 1e-13;

const HERMITIAN_STRUCTURE_EPS: f64 = 1e-14;

/// Pass criterion `error <= absolute + relative * scale`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            absolute: 1e-10,
            relative: 1e-12,
        }
    }
}

impl Tolerance {
    pub const fn new(absolute: f64, relative: f64) -> Self {
        Self { absolute, relative }
    }

    pub const fn absolute(absolute: f64) -> Self {
        Self {
            absolute,
            relative: 0.0,
        }
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.absolute + self.relative * scale
    }

    pub fn accepts(&self, error: f64, scale: f64) -> bool {
        error <= self.bound(scale)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `‖U†U − 1‖` measured entrywise.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.ncols())))
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigen-data of a Hermitian matrix: ascending real eigenvalues and the
/// unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    fn sorted(values: Vec<f64>, vectors: CMatrix) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let sorted_values = order.iter().map(|&i| values[i]).collect();
        let sorted_vectors = CMatrix::from_fn(vectors.nrows(), order.len(), |r, k| {
            vectors[(r, order[k])]
        });
        Self {
            values: sorted_values,
            vectors: sorted_vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let fk = f(self.values[k]);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= fk;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|v| c(v, 0.0))
    }

    pub fn check_positive(&self) -> Result<()> {
        let floor = POSITIVITY_FLOOR * self.max();
        let min = self.min();
        if !(min > 0.0 && min > floor) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
                floor,
            });
        }
        Ok(())
    }

    /// `V diag(λ^z) V†` for a positive spectrum.
    pub fn power(&self, z: C64) -> Result<CMatrix> {
        self.check_positive()?;
        Ok(self.map(|v| (z * v.ln()).exp()))
    }

    pub fn condition_number(&self) -> f64 {
        let min = self.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let max = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        max / min
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &CMatrix, tol: Tolerance) -> Result<Spectrum> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = hermitian_deviation(m);
    if !tol.accepts(deviation, max_abs(m)) {
        return Err(Error::NotHermitian { deviation });
    }
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let symmetric = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(symmetric, f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::ConvergenceFailure("Hermitian eigensolver"))?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure("Hermitian eigensolver"));
    }
    Ok(Spectrum::sorted(values, eig.eigenvectors))
}

/// `m^z` for a positive-definite Hermitian `m`.
pub fn complex_power(m: &CMatrix, z: C64) -> Result<CMatrix> {
    hermitian_eig(m, Tolerance::default())?.power(z)
}

/// Antilinear operator `v ↦ linear · conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    pub linear: CMatrix,
}

impl AntilinearMap {
    pub fn new(linear: CMatrix) -> Result<Self> {
        ensure_square(&linear)?;
        ensure_finite(&linear)?;
        Ok(Self { linear })
    }

    /// Plain entrywise conjugation.
    pub fn conjugation(n: usize) -> Self {
        Self {
            linear: identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.nrows()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.linear * v.conjugate()
    }

    /// `self ∘ other` for two antilinear maps, which is linear.
    pub fn compose(&self, other: &AntilinearMap) -> CMatrix {
        &self.linear * other.linear.conjugate()
    }

    /// `self ∘ m` for a linear `m`.
    pub fn after_linear(&self, m: &CMatrix) -> AntilinearMap {
        AntilinearMap {
            linear: &self.linear * m.conjugate(),
        }
    }

    /// `m ∘ self` for a linear `m`.
    pub fn before_linear(&self, m: &CMatrix) -> AntilinearMap {
        AntilinearMap {
            linear: m * &self.linear,
        }
    }

    /// Adjoint in the antilinear sense: `⟨x, S y⟩ = conj⟨S† x, y⟩`.
    pub fn adjoint(&self) -> AntilinearMap {
        AntilinearMap {
            linear: self.linear.transpose(),
        }
    }

    /// `J X J` for the linear operator `X`, itself linear.
    pub fn conjugate_operator(&self, x: &CMatrix) -> CMatrix {
        &self.linear * x.conjugate() * self.linear.conjugate()
    }

    pub fn antiunitarity_error(&self) -> f64 {
        unitarity_error(&self.linear)
    }

    /// `‖S ∘ S − 1‖`.
    pub fn involution_error(&self) -> f64 {
        max_abs(&(self.compose(self) - identity(self.dim())))
    }
}

/// Polar parts of an antilinear map `S = J Δ^{1/2}`.
#[derive(Debug, Clone)]
pub struct AntilinearPolar {
    pub j: AntilinearMap,
    pub delta: CMatrix,
    /// Spectral data of `Δ` taken from the singular values of `S`, which keeps
    /// small eigenvalues at full relative accuracy.
    pub delta_spectrum: Spectrum,
}

impl AntilinearPolar {
    pub fn delta_power(&self, z: C64) -> Result<CMatrix> {
        self.delta_spectrum.power(z)
    }

    /// `‖S − J Δ^{1/2}‖` entrywise on the linear parts.
    pub fn reconstruction_error(&self, s: &AntilinearMap) -> Result<f64> {
        let root = self.delta_power(c(0.5, 0.0))?;
        let rebuilt = self.j.after_linear(&root);
        Ok(max_abs(&(&s.linear - &rebuilt.linear)))
    }
}

/// Polar decomposition of an antilinear map with full-rank linear part.
///
/// With `S v = L v̄` and `L = U Σ V†`, the positive part is
/// `Δ = S†S = L^T L̄ = V̄ Σ² V^T` and the antiunitary part has linear part `U V†`.
pub fn antilinear_polar(s: &AntilinearMap) -> Result<AntilinearPolar> {
    let n = s.dim();
    ensure_finite(&s.linear)?;
    let svd = s.linear.clone().svd(true, true);
    let u = svd.u.ok_or(Error::ConvergenceFailure("singular value decomposition"))?;
    let v_t = svd
        .v_t
        .ok_or(Error::ConvergenceFailure("singular value decomposition"))?;
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let max_sigma = sigma.iter().copied().fold(0.0, f64::max);
    let min_sigma = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if max_sigma > 0.0 { min_sigma / max_sigma } else { 0.0 };
    if !(ratio * ratio > POSITIVITY_FLOOR) {
        return Err(Error::SingularMap { ratio });
    }

    let j = AntilinearMap {
        linear: &u * &v_t,
    };
    // columns of V̄ = conj(v_t†) = v_t^T
    let eigvecs = v_t.transpose();
    let values: Vec<f64> = sigma.iter().map(|s| s * s).collect();
    let delta_spectrum = Spectrum::sorted(values, eigvecs);
    let delta = delta_spectrum.reconstruct();
    debug_assert_eq!(delta.nrows(), n);
    Ok(AntilinearPolar {
        j,
        delta,
        delta_spectrum,
    })
}

/// Which route computed a matrix exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpRoute {
    Zero,
    Hermitian,
    AntiHermitian,
    Series,
}

/// `exp(scale · m)`; (anti-)Hermitian arguments use the eigendecomposition.
pub fn mat_exp(m: &CMatrix, scale: C64) -> Result<CMatrix> {
    mat_exp_with_route(m, scale).map(|(e, _)| e)
}

pub fn mat_exp_with_route(m: &CMatrix, scale: C64) -> Result<(CMatrix, ExpRoute)> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let a = m * scale;
    ensure_finite(&a)?;
    if a.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok((identity(n), ExpRoute::Zero));
    }
    let size = max_abs(&a);
    let structure_tol = Tolerance::new(0.0, HERMITIAN_STRUCTURE_EPS);
    if structure_tol.accepts(hermitian_deviation(&a), size) {
        let spec = hermitian_eig(&a, Tolerance::default())?;
        return Ok((spec.map(|v| c(v.exp(), 0.0)), ExpRoute::Hermitian));
    }
    let h = &a * c(0.0, -1.0);
    if structure_tol.accepts(hermitian_deviation(&h), size) {
        let spec = hermitian_eig(&h, Tolerance::default())?;
        return Ok((spec.map(|v| c(0.0, v).exp()), ExpRoute::AntiHermitian));
    }
    Ok((mat_exp_series(&a)?, ExpRoute::Series))
}

/// Scaling-and-squaring Taylor series for `exp(a)`.
pub fn mat_exp_series(a: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / c(2f64.powi(squarings), 0.0);
    let mut sum = identity(n);
    let mut term = identity(n);
    let mut converged = false;
    for k in 1..=60 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
        if max_abs(&term) <= f64::EPSILON * max_abs(&sum) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure("Taylor series for exp"));
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    ensure_finite(&sum).map_err(|_| Error::ConvergenceFailure("Taylor series for exp"))?;
    Ok(sum)
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Orthonormal basis (Hilbert–Schmidt) of a growing operator span.
#[derive(Debug, Clone, Default)]
pub struct OperatorSpan {
    basis: Vec<CMatrix>,
}

impl OperatorSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Component of `m` orthogonal to the span (two Gram–Schmidt passes).
    pub fn residual(&self, m: &CMatrix) -> CMatrix {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let coef = hs_inner(b, &r);
                r -= b * coef;
            }
        }
        r
    }

    /// Relative distance of `m` to the span.
    pub fn distance(&self, m: &CMatrix) -> f64 {
        let norm = frobenius(m);
        if norm == 0.0 {
            return 0.0;
        }
        frobenius(&self.residual(m)) / norm
    }

    /// Adds `m` if it is independent at relative level `rel_tol`; returns
    /// whether the span grew.
    pub fn insert(&mut self, m: &CMatrix, rel_tol: f64) -> bool {
        let norm = frobenius(m);
        if norm == 0.0 {
            return false;
        }
        let r = self.residual(m);
        let rn = frobenius(&r);
        if rn <= rel_tol * norm {
            return false;
        }
        self.basis.push(r / c(rn, 0.0));
        true
    }
}

/// Numerical rank from singular values with a relative cutoff.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_anti_hermitian, random_hermitian, seeded};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn eig_of_identity() {
        let s = hermitian_eig(&identity(3), Tolerance::default()).unwrap();
        assert_eq!(s.values.len(), 3);
        for v in &s.values {
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(unitarity_error(&s.vectors) < 1e-14);
    }

    #[test]
    fn eig_sorts_diagonal_input() {
        let s = hermitian_eig(&diag_real(&[2.0, -1.0]), Tolerance::default()).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15);
        assert!((s.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let m = random_hermitian(6, &mut seeded(7));
        let s = hermitian_eig(&m, Tolerance::default()).unwrap();
        assert!(max_abs(&(s.reconstruct() - &m)) < 1e-12);
        assert!(unitarity_error(&s.vectors) < 1e-12);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eig(&m, Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn power_of_identity_is_identity() {
        for z in [c(0.5, 0.0), c(0.0, 3.0), c(-2.0, 1.5)] {
            let p = complex_power(&identity(2), z).unwrap();
            assert!(max_abs(&(p - identity(2))) < 1e-15);
        }
    }

    #[test]
    fn square_root_of_diagonal() {
        let p = complex_power(&diag_real(&[4.0, 1.0]), c(0.5, 0.0)).unwrap();
        assert!(max_abs(&(p - diag_real(&[2.0, 1.0]))) < 1e-15);
    }

    #[test]
    fn imaginary_power_of_diagonal() {
        let p = complex_power(&diag_real(&[4.0, 1.0]), c(0.0, 1.0)).unwrap();
        let expected = c(0.0, 4f64.ln()).exp();
        assert!((p[(0, 0)] - expected).norm() < 1e-15);
        assert!((p[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(unitarity_error(&p) < 1e-13);
    }

    #[test]
    fn power_rejects_singular_input() {
        let err = complex_power(&diag_real(&[1.0, 1e-15]), c(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        let err = complex_power(&diag_real(&[1.0, -1.0]), c(0.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn polar_of_plain_conjugation() {
        let s = AntilinearMap::conjugation(3);
        let p = antilinear_polar(&s).unwrap();
        assert!(max_abs(&(&p.j.linear - identity(3))) < 1e-15);
        assert!(max_abs(&(&p.delta - identity(3))) < 1e-15);
    }

    #[test]
    fn polar_of_diagonal_map() {
        let s = AntilinearMap::new(diag_real(&[2.0, 0.5])).unwrap();
        let p = antilinear_polar(&s).unwrap();
        assert!(max_abs(&(&p.delta - diag_real(&[4.0, 0.25]))) < 1e-14);
        assert!(max_abs(&(&p.j.linear - identity(2))) < 1e-14);
        assert!(p.reconstruction_error(&s).unwrap() < 1e-14);
    }

    #[test]
    fn polar_delta_matches_direct_adjoint_product() {
        let mut rng = seeded(5);
        let l = crate::random::random_complex(5, &mut rng);
        let s = AntilinearMap::new(l.clone()).unwrap();
        let p = antilinear_polar(&s).unwrap();
        let direct = l.transpose() * l.conjugate();
        assert!(max_abs(&(&p.delta - direct)) < 1e-12);
        assert!(p.j.antiunitarity_error() < 1e-12);
    }

    #[test]
    fn polar_rejects_rank_deficient() {
        let s = AntilinearMap::new(diag_real(&[1.0, 0.0])).unwrap();
        assert!(matches!(antilinear_polar(&s), Err(Error::SingularMap { .. })));
    }

    #[test]
    fn antilinear_apply_on_basis_vectors() {
        let l = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)]);
        let s = AntilinearMap::new(l.clone()).unwrap();
        let v = CVector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0)]);
        // S(i e0) = -i S(e0) = -i L e0
        let expected = l.column(0) * c(0.0, -1.0);
        assert!((s.apply(&v) - expected).norm() < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_exact_identity() {
        let m = random_hermitian(4, &mut seeded(1));
        let (e, route) = mat_exp_with_route(&m, c(0.0, 0.0)).unwrap();
        assert_eq!(route, ExpRoute::Zero);
        assert_eq!(e, identity(4));
    }

    #[test]
    fn exp_of_scalar_phase() {
        let e = mat_exp(&diag_real(&[1.0, -1.0]), c(0.0, PI)).unwrap();
        assert!(max_abs(&(e + identity(2))) < 1e-14);
    }

    #[test]
    fn exp_of_anti_hermitian_is_unitary() {
        let a = random_anti_hermitian(4, &mut seeded(3));
        let (u, route) = mat_exp_with_route(&a, c(1.0, 0.0)).unwrap();
        assert_eq!(route, ExpRoute::AntiHermitian);
        assert!(unitarity_error(&u) < 1e-12);
        let series = mat_exp_series(&a).unwrap();
        assert!(max_abs(&(series - u)) < 1e-12);
    }

    #[test]
    fn exp_general_matrix_uses_series() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let (e, route) = mat_exp_with_route(&m, c(1.0, 0.0)).unwrap();
        assert_eq!(route, ExpRoute::Series);
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(max_abs(&(e - expected)) < 1e-15);
    }

    #[test]
    fn operator_span_distance() {
        let mut span = OperatorSpan::new();
        assert!(span.insert(&diag_real(&[1.0, 0.0]), 1e-12));
        assert!(!span.insert(&diag_real(&[3.0, 0.0]), 1e-12));
        assert!(span.distance(&diag_real(&[2.0, 0.0])) < 1e-15);
        assert!((span.distance(&diag_real(&[0.0, 1.0])) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn imaginary_powers_are_unitary(seed in 0u64..10_000, dim in 1usize..24, t in -20.0f64..20.0) {
            let p = crate::random::random_positive(dim, &mut seeded(seed));
            let u = complex_power(&p, c(0.0, t)).unwrap();
            prop_assert!(unitarity_error(&u) < 1e-10);
        }

        #[test]
        fn power_semigroup_law(seed in 0u64..10_000, dim in 1usize..12,
                               a in -2.0f64..2.0, b in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let p = crate::random::random_positive(dim, &mut seeded(seed));
            let z1 = c(a, b);
            let z2 = c(x, y);
            let lhs = complex_power(&p, z1).unwrap() * complex_power(&p, z2).unwrap();
            let rhs = complex_power(&p, z1 + z2).unwrap();
            prop_assert!(max_abs(&(&lhs - &rhs)) <= 1e-9 * (1.0 + max_abs(&rhs)));
        }

        #[test]
        fn polar_reconstructs(seed in 0u64..10_000, dim in 1usize..20) {
            let l = crate::random::random_complex(dim, &mut seeded(seed));
            let s = AntilinearMap::new(l).unwrap();
            if let Ok(p) = antilinear_polar(&s) {
                prop_assert!(p.reconstruction_error(&s).unwrap() < 1e-10);
                prop_assert!(p.j.antiunitarity_error() < 1e-10);
            }
        }

        #[test]
        fn exp_routes_agree_on_hermitian(seed in 0u64..10_000, dim in 1usize..10, norm in 0.1f64..10.0) {
            let h = random_hermitian(dim, &mut seeded(seed));
            let h = &h * c(norm / operator_norm(&h), 0.0);
            let (eig, route) = mat_exp_with_route(&h, c(1.0, 0.0)).unwrap();
            prop_assert_eq!(route, ExpRoute::Hermitian);
            let series = mat_exp_series(&h).unwrap();
            prop_assert!(max_abs(&(series - &eig)) <= 1e-9 * max_abs(&eig).max(1.0));
        }
    }
}
