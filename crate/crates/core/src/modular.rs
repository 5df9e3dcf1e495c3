//! Finite-dimensional modular theory.
//!
//! The standard setting is `M = M_d ⊗ 1` acting on `ℂ^d ⊗ ℂ^d` with the
//! vector `Ω = vec(ρ^{1/2})` (row-major, index `i·d + j`). There
//! `Δ = ρ ⊗ ρ^{-1}`, `J` is the swap composed with conjugation, and the
//! modular flow is `σ_t(A ⊗ 1) = ρ^{it} A ρ^{-it} ⊗ 1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::linalg::{
    antilinear_polar, c, ensure_finite, ensure_square, frobenius, hermitian_eig, identity, kron, max_abs,
    numerical_rank, operator_norm, unitarity_error, AntilinearMap, AntilinearPolar, CMatrix, CVector, OperatorSpan,
    Spectrum, Tolerance, C64, POSITIVITY_FLOOR,
};
use crate::report::{fmt_sci, CheckReport};

pub const GNS_ANCHOR: &str = "GNS representation with a cyclic vector implementing the state";
pub const CYCLIC_ANCHOR: &str = "cyclic and separating vector for the local algebra";
pub const TOMITA_ANCHOR: &str = "Tomita–Takesaki: S = JΔ^{1/2}, JMJ = M′, modular automorphism group";
pub const KMS_ANCHOR: &str = "KMS condition on the analytic strip";
pub const GIBBS_ANCHOR: &str = "Gibbs state is KMS at inverse temperature β for the Heisenberg flow";
pub const COCYCLE_ANCHOR: &str = "Connes cocycle: modular flows of two states differ by an inner twist";
pub const UNRUH_ANCHOR: &str = "Unruh temperature T = ħa/(2πck_B) from the boost-rapidity period";

/// Relative level below which a candidate operator counts as dependent.
pub const SPAN_TOL: f64 = 1e-10;
/// Largest `cond(Δ)` for which the imaginary-time continuation is trusted.
pub const CONDITION_GUARD: f64 = 1e12;

/// Unital *-algebra generated by a set of matrices, with its commutant.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    generators: Vec<CMatrix>,
    n: usize,
    closure: OperatorSpan,
    // the commutant solve is O(n⁶), so it runs only when asked for
    commutant: OnceLock<std::result::Result<OperatorSpan, Error>>,
}

fn letters(generators: &[CMatrix]) -> Vec<CMatrix> {
    generators
        .iter()
        .flat_map(|g| [g.clone(), g.adjoint()])
        .collect()
}

impl FiniteAlgebra {
    pub fn generate(generators: Vec<CMatrix>) -> Result<Self> {
        let n = match generators.first() {
            Some(g) => ensure_square(g)?,
            None => return Err(Error::InvalidInput("algebra needs at least one generator".into())),
        };
        for g in &generators {
            let m = ensure_square(g)?;
            if m != n {
                return Err(Error::DimensionMismatch { expected: n, found: m });
            }
            ensure_finite(g)?;
        }
        let letters = letters(&generators);

        // breadth-first over words; a rejected word's extensions are combinations
        // of extensions of accepted words, so they need no visit
        let mut closure = OperatorSpan::new();
        closure.insert(&identity(n), SPAN_TOL);
        let mut frontier = vec![identity(n)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for l in &letters {
                    let p = l * w;
                    if closure.insert(&p, SPAN_TOL) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }

        Ok(Self {
            generators,
            n,
            closure,
            commutant: OnceLock::new(),
        })
    }

    /// Algebra whose generators already span a unital *-closed set, so the
    /// closure is their span and the word search is skipped.
    fn from_closed_generators(generators: Vec<CMatrix>) -> Result<Self> {
        let n = match generators.first() {
            Some(g) => ensure_square(g)?,
            None => return Err(Error::InvalidInput("algebra needs at least one generator".into())),
        };
        let mut closure = OperatorSpan::new();
        for g in &generators {
            closure.insert(g, SPAN_TOL);
        }
        let alg = Self {
            generators,
            n,
            closure,
            commutant: OnceLock::new(),
        };
        debug_assert!(alg.distance_to_closure(&identity(n)) < SPAN_TOL);
        Ok(alg)
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// Dimension of the Hilbert space acted on.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Orthonormal (Hilbert–Schmidt) basis of the algebra.
    pub fn closure(&self) -> &[CMatrix] {
        self.closure.basis()
    }

    fn commutant_span(&self) -> Result<&OperatorSpan> {
        self.commutant
            .get_or_init(|| commutant_span(&letters(&self.generators), self.n))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Orthonormal basis of the commutant.
    pub fn commutant(&self) -> Result<&[CMatrix]> {
        Ok(self.commutant_span()?.basis())
    }

    pub fn distance_to_closure(&self, m: &CMatrix) -> f64 {
        self.closure.distance(m)
    }

    pub fn distance_to_commutant(&self, m: &CMatrix) -> Result<f64> {
        Ok(self.commutant_span()?.distance(m))
    }

    /// Largest relative distance from the span of generator-times-basis and
    /// adjoint-basis elements; zero when re-closing adds nothing.
    pub fn closure_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for b in self.closure() {
            worst = worst.max(self.closure.distance(&b.adjoint()));
            for l in letters(&self.generators) {
                worst = worst.max(self.closure.distance(&(&l * b)));
            }
        }
        worst
    }

    /// Mutual span distance between the algebra and the commutant of its
    /// commutant.
    pub fn double_commutant_residual(&self) -> Result<f64> {
        let inner = FiniteAlgebra::generate(self.commutant()?.to_vec())?;
        Ok(span_equality_residual(self.closure(), inner.commutant()?))
    }
}

fn commutant_span(letters: &[CMatrix], n: usize) -> Result<OperatorSpan> {
    // vec is column-major: vec(gX) = (1⊗g)vec X, vec(Xg) = (gᵀ⊗1)vec X
    let nn = n * n;
    let id = identity(n);
    let mut gram = CMatrix::zeros(nn, nn);
    let mut scale = 0.0;
    for l in letters {
        let cg = kron(&id, l) - kron(&l.transpose(), &id);
        gram += cg.adjoint() * &cg;
        scale += frobenius(l).powi(2);
    }
    let spec = hermitian_eig(&gram, Tolerance::default())?;
    let threshold = SPAN_TOL * scale.max(f64::MIN_POSITIVE);
    let mut span = OperatorSpan::new();
    for (k, &value) in spec.values.iter().enumerate() {
        if value > threshold {
            break;
        }
        let col = spec.vectors.column(k);
        let m = CMatrix::from_column_slice(n, n, col.as_slice());
        span.insert(&m, SPAN_TOL);
    }
    Ok(span)
}

/// Largest relative distance of each list's elements from the other's span.
pub fn span_equality_residual(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    let span_of = |list: &[CMatrix]| {
        let mut s = OperatorSpan::new();
        for m in list {
            s.insert(m, SPAN_TOL);
        }
        s
    };
    let (sa, sb) = (span_of(a), span_of(b));
    let one_way = a.iter().map(|m| sb.distance(m)).fold(0.0, f64::max);
    let other_way = b.iter().map(|m| sa.distance(m)).fold(0.0, f64::max);
    one_way.max(other_way)
}

/// Dimension of the orbit `span{w·v : w a word in the generators}`.
pub fn orbit_dimension(generators: &[CMatrix], v: &CVector, rel_tol: f64) -> usize {
    let norm = v.norm();
    if norm == 0.0 {
        return 0;
    }
    let mut basis: Vec<CVector> = Vec::new();
    let insert = |x: &CVector, basis: &mut Vec<CVector>| {
        let xn = x.norm();
        let mut r = x.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let coef = b.dotc(&r);
                r -= b * coef;
            }
        }
        let rn = r.norm();
        if rn > rel_tol * xn && rn > 0.0 {
            basis.push(r / c(rn, 0.0));
            true
        } else {
            false
        }
    };
    insert(v, &mut basis);
    let mut frontier = vec![v.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in generators {
                let y = g * x;
                if insert(&y, &mut basis) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    basis.len()
}

/// Outcome of the cyclic/separating test with explicit witnesses.
#[derive(Debug, Clone)]
pub struct CyclicSeparating {
    pub cyclic: bool,
    pub separating: bool,
    /// Dimension of `span{A v : A ∈ M}`.
    pub orbit_rank: usize,
    pub algebra_dim: usize,
    /// Unit vector orthogonal to the orbit when not cyclic.
    pub cyclic_witness: Option<CVector>,
    /// Nonzero algebra element with `A v ≈ 0` when not separating.
    pub separating_witness: Option<CMatrix>,
}

impl CyclicSeparating {
    pub fn report(&self, name: impl Into<String>) -> CheckReport {
        CheckReport::predicate(name, CYCLIC_ANCHOR, self.cyclic && self.separating)
            .with_note("cyclic", self.cyclic)
            .with_note("separating", self.separating)
            .with_note("orbit_rank", self.orbit_rank)
            .with_note("algebra_dim", self.algebra_dim)
    }
}

/// Matrix whose columns are `A_k v` over the closure basis.
fn evaluation_matrix(alg: &FiniteAlgebra, v: &CVector) -> CMatrix {
    let basis = alg.closure();
    let mut e = CMatrix::zeros(alg.dim(), basis.len());
    for (k, a) in basis.iter().enumerate() {
        e.set_column(k, &(a * v));
    }
    e
}

fn smallest_eigenvector(m: &CMatrix) -> Result<CVector> {
    let spec = hermitian_eig(m, Tolerance::default())?;
    Ok(spec.vectors.column(0).into_owned())
}

pub fn cyclic_separating_check(alg: &FiniteAlgebra, v: &CVector) -> Result<CyclicSeparating> {
    if v.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: v.len(),
        });
    }
    let e = evaluation_matrix(alg, v);
    let rank = numerical_rank(&e, SPAN_TOL);
    let m = alg.closure().len();
    let cyclic = rank == alg.dim();
    let separating = rank == m;
    let cyclic_witness = if cyclic {
        None
    } else {
        Some(smallest_eigenvector(&(&e * e.adjoint()))?)
    };
    let separating_witness = if separating {
        None
    } else {
        let coef = smallest_eigenvector(&(e.adjoint() * &e))?;
        let mut a = CMatrix::zeros(alg.dim(), alg.dim());
        for (ck, bk) in coef.iter().zip(alg.closure()) {
            a += bk * *ck;
        }
        Some(a)
    };
    Ok(CyclicSeparating {
        cyclic,
        separating,
        orbit_rank: rank,
        algebra_dim: m,
        cyclic_witness,
        separating_witness,
    })
}

fn validate_density(rho: &CMatrix) -> Result<Spectrum> {
    let n = ensure_square(rho)?;
    if n == 0 {
        return Err(Error::NotAState("empty matrix".into()));
    }
    ensure_finite(rho)?;
    let dev = crate::linalg::hermitian_deviation(rho);
    if dev > 1e-10 * max_abs(rho).max(1.0) {
        return Err(Error::NotAState(format!("not Hermitian (deviation {dev:.3e})")));
    }
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::NotAState(format!("trace {tr} is not 1")));
    }
    let spec = hermitian_eig(rho, Tolerance::default())?;
    if spec.min() < -1e-12 {
        return Err(Error::NotAState(format!("negative eigenvalue {:.3e}", spec.min())));
    }
    Ok(spec)
}

/// GNS data of a state on the full matrix algebra `M_d`.
#[derive(Debug, Clone)]
pub struct Gns {
    rho: CMatrix,
    /// Algebra elements whose classes form an orthonormal basis of the
    /// quotient by the null space.
    classes: Vec<CMatrix>,
    omega: CVector,
}

impl Gns {
    pub fn rep_space_dim(&self) -> usize {
        self.classes.len()
    }

    pub fn omega(&self) -> &CVector {
        &self.omega
    }

    /// `⟨X, Y⟩ = ω(X†Y)`.
    fn inner(&self, x: &CMatrix, y: &CMatrix) -> C64 {
        (&self.rho * x.adjoint() * y).trace()
    }

    /// Matrix of left multiplication by `a` in the quotient basis.
    pub fn represent(&self, a: &CMatrix) -> CMatrix {
        let r = self.classes.len();
        CMatrix::from_fn(r, r, |m, n| self.inner(&self.classes[m], &(a * &self.classes[n])))
    }

    pub fn expectation(&self, a: &CMatrix) -> C64 {
        self.omega.dotc(&(self.represent(a) * &self.omega))
    }

    pub fn state_value(&self, a: &CMatrix) -> C64 {
        (&self.rho * a).trace()
    }
}

pub fn gns_construct(rho: &CMatrix) -> Result<Gns> {
    validate_density(rho)?;
    let d = rho.nrows();
    // Gram matrix on matrix units: ω(E_ij† E_kl) = δ_ik ρ_lj
    let units: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
    let gram = CMatrix::from_fn(d * d, d * d, |p, q| {
        let (i, j) = units[p];
        let (k, l) = units[q];
        if i == k {
            rho[(l, j)]
        } else {
            c(0.0, 0.0)
        }
    });
    let spec = hermitian_eig(&gram, Tolerance::default())?;
    let threshold = 1e-12 * spec.max().max(1.0);
    let mut classes = Vec::new();
    for (k, &lambda) in spec.values.iter().enumerate() {
        if lambda <= threshold {
            continue;
        }
        let mut x = CMatrix::zeros(d, d);
        for (p, &(i, j)) in units.iter().enumerate() {
            x[(i, j)] = spec.vectors[(p, k)] / lambda.sqrt();
        }
        classes.push(x);
    }
    let id = identity(d);
    let mut gns = Gns {
        rho: rho.clone(),
        classes,
        omega: CVector::zeros(0),
    };
    gns.omega = CVector::from_iterator(gns.classes.len(), gns.classes.iter().map(|x| gns.inner(x, &id)));
    Ok(gns)
}

/// `M_d ⊗ 1` on `ℂ^d ⊗ ℂ^d` with `Ω = vec(ρ^{1/2})`.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub rho: CMatrix,
    pub algebra: FiniteAlgebra,
    pub omega: CVector,
}

impl StandardForm {
    pub fn new(rho: &CMatrix) -> Result<Self> {
        let spec = validate_density(rho)?;
        if spec.min() <= POSITIVITY_FLOOR * spec.max() {
            return Err(Error::SingularState {
                min_eigenvalue: spec.min(),
            });
        }
        let d = rho.nrows();
        let mut generators = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                generators.push(kron(&e, &identity(d)));
            }
        }
        Ok(Self {
            rho: rho.clone(),
            // matrix units span M_d ⊗ 1 outright
            algebra: FiniteAlgebra::from_closed_generators(generators)?,
            omega: vec_sqrt(&spec),
        })
    }

    pub fn factor_dim(&self) -> usize {
        self.rho.nrows()
    }

    /// `a ⊗ 1`.
    pub fn lift(&self, a: &CMatrix) -> CMatrix {
        kron(a, &identity(self.factor_dim()))
    }

    pub fn triple(&self) -> Result<ModularTriple> {
        tomita_triple(&self.algebra, &self.omega)
    }
}

fn vec_sqrt(spec: &Spectrum) -> CVector {
    let root = spec.map(|x| c(x.max(0.0).sqrt(), 0.0));
    let d = root.nrows();
    CVector::from_fn(d * d, |k, _| root[(k / d, k % d)])
}

/// `ω(X) = ⟨v, X v⟩`.
pub fn vector_state(v: &CVector, x: &CMatrix) -> C64 {
    v.dotc(&(x * v))
}

/// The antilinear map `A u ↦ A† w` over the closure basis, defined when the
/// vectors `A_k u` form a basis.
fn relative_s_map(alg: &FiniteAlgebra, u: &CVector, w: &CVector) -> Result<AntilinearMap> {
    let basis = alg.closure();
    let n = alg.dim();
    if basis.len() != n {
        return Err(Error::InvalidInput(format!(
            "closure dimension {} differs from space dimension {n}",
            basis.len()
        )));
    }
    let mut from = CMatrix::zeros(n, n);
    let mut to = CMatrix::zeros(n, n);
    for (k, a) in basis.iter().enumerate() {
        from.set_column(k, &(a * u));
        to.set_column(k, &(a.adjoint() * w));
    }
    // S(Σ c_k A_k u) = Σ c̄_k A_k† w  ⇒  L·conj(from) = to
    let inv = from
        .conjugate()
        .try_inverse()
        .ok_or(Error::SingularMap { ratio: 0.0 })?;
    AntilinearMap::new(to * inv)
}

/// Tomita data `(S, J, Δ)` of a cyclic and separating vector.
#[derive(Debug, Clone)]
pub struct ModularTriple {
    pub algebra: FiniteAlgebra,
    pub omega: CVector,
    pub s: AntilinearMap,
    pub j: AntilinearMap,
    pub delta: CMatrix,
    polar: AntilinearPolar,
}

/// Residuals of the defining properties of a modular triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleResiduals {
    pub s_defining: f64,
    pub delta_fixes_omega: f64,
    pub j_fixes_omega: f64,
    pub j_involution: f64,
    pub j_antiunitary: f64,
    pub polar_reconstruction: f64,
    pub j_m_j_commutant: f64,
}

impl TripleResiduals {
    pub fn max(&self) -> f64 {
        [
            self.s_defining,
            self.delta_fixes_omega,
            self.j_fixes_omega,
            self.j_involution,
            self.j_antiunitary,
            self.polar_reconstruction,
            self.j_m_j_commutant,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn tomita_triple(alg: &FiniteAlgebra, v: &CVector) -> Result<ModularTriple> {
    let cs = cyclic_separating_check(alg, v)?;
    if !(cs.cyclic && cs.separating) {
        return Err(Error::NotCyclicSeparating {
            cyclic: cs.cyclic,
            separating: cs.separating,
        });
    }
    let s = relative_s_map(alg, v, v)?;
    let polar = antilinear_polar(&s)?;
    Ok(ModularTriple {
        algebra: alg.clone(),
        omega: v.clone(),
        s,
        j: polar.j.clone(),
        delta: polar.delta.clone(),
        polar,
    })
}

impl ModularTriple {
    pub fn delta_spectrum(&self) -> &Spectrum {
        &self.polar.delta_spectrum
    }

    pub fn delta_power(&self, z: C64) -> Result<CMatrix> {
        self.polar.delta_power(z)
    }

    pub fn condition_number(&self) -> f64 {
        self.polar.delta_spectrum.condition_number()
    }

    pub fn state(&self, x: &CMatrix) -> C64 {
        vector_state(&self.omega, x)
    }

    pub fn residuals(&self) -> Result<TripleResiduals> {
        let v = &self.omega;
        let mut s_defining = 0.0f64;
        for a in self.algebra.closure() {
            let lhs = self.s.apply(&(a * v));
            s_defining = s_defining.max((lhs - a.adjoint() * v).norm());
        }
        let delta_fixes_omega = (&self.delta * v - v).norm();
        let j_fixes_omega = (self.j.apply(v) - v).norm();
        let j_m_j: Vec<CMatrix> = self
            .algebra
            .closure()
            .iter()
            .map(|a| self.j.conjugate_operator(a))
            .collect();
        Ok(TripleResiduals {
            s_defining,
            delta_fixes_omega,
            j_fixes_omega,
            j_involution: self.j.involution_error(),
            j_antiunitary: self.j.antiunitarity_error(),
            polar_reconstruction: self.polar.reconstruction_error(&self.s)?,
            j_m_j_commutant: span_equality_residual(&j_m_j, self.algebra.commutant()?),
        })
    }

    pub fn check(&self, name: impl Into<String>, tol: f64) -> Result<CheckReport> {
        let r = self.residuals()?;
        Ok(CheckReport::new(name, TOMITA_ANCHOR, r.max(), tol)
            .with_note("s_defining", fmt_sci(r.s_defining))
            .with_note("delta_fixes_omega", fmt_sci(r.delta_fixes_omega))
            .with_note("j_fixes_omega", fmt_sci(r.j_fixes_omega))
            .with_note("j_involution", fmt_sci(r.j_involution))
            .with_note("j_antiunitary", fmt_sci(r.j_antiunitary))
            .with_note("polar_reconstruction", fmt_sci(r.polar_reconstruction))
            .with_note("j_m_j_commutant", fmt_sci(r.j_m_j_commutant)))
    }

    /// Largest distance of `σ_t(A)` from the algebra over the closure basis.
    pub fn flow_preservation_residual(&self, times: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &t in times {
            let u = self.delta_power(c(0.0, t))?;
            let u_inv = u.adjoint();
            for a in self.algebra.closure() {
                worst = worst.max(self.algebra.distance_to_closure(&(&u * a * &u_inv)));
            }
        }
        Ok(worst)
    }
}

/// `σ_t(a) = Δ^{it} a Δ^{-it}`.
pub fn modular_flow(t: f64, triple: &ModularTriple, a: &CMatrix) -> Result<CMatrix> {
    let distance = triple.algebra.distance_to_closure(a);
    if distance > 1e-8 {
        return Err(Error::NotInAlgebra { distance });
    }
    let u = triple.delta_power(c(0.0, t))?;
    Ok(&u * a * u.adjoint())
}

/// How `σ_{t±i}` is continued. `Corrupted` exchanges `Δ^{-1}` and `Δ`, i.e.
/// continues to the wrong strip edge. Swapping only the factor next to `Ω`
/// would be invisible, since `ΔΩ = Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuation {
    Exact,
    Corrupted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmsResiduals {
    /// `|ω(σ_{t+i}(B) A) − ω(A σ_t(B))|`.
    pub upper: f64,
    /// `|ω(A σ_{t−i}(B)) − ω(σ_t(B) A)|`.
    pub lower: f64,
    pub scale: f64,
}

impl KmsResiduals {
    pub fn max(&self) -> f64 {
        self.upper.max(self.lower)
    }
}

pub fn kms_residuals(
    triple: &ModularTriple,
    a: &CMatrix,
    b: &CMatrix,
    t: f64,
    continuation: Continuation,
) -> Result<KmsResiduals> {
    let condition = triple.condition_number();
    if !(condition <= CONDITION_GUARD) {
        return Err(Error::IllConditioned { condition });
    }
    for m in [a, b] {
        let distance = triple.algebra.distance_to_closure(m);
        if distance > 1e-8 {
            return Err(Error::NotInAlgebra { distance });
        }
    }
    let u = triple.delta_power(c(0.0, t))?;
    let u_inv = u.adjoint();
    let delta = &triple.delta;
    let delta_inv = triple.delta_power(c(-1.0, 0.0))?;
    let (up_left, up_right) = match continuation {
        Continuation::Exact => (&delta_inv, delta),
        Continuation::Corrupted => (delta, &delta_inv),
    };
    let sigma_t = &u * b * &u_inv;
    let sigma_up = &u * up_left * b * up_right * &u_inv;
    let sigma_down = &u * delta * b * &delta_inv * &u_inv;
    let upper = (triple.state(&(&sigma_up * a)) - triple.state(&(a * &sigma_t))).norm();
    let lower = (triple.state(&(a * &sigma_down)) - triple.state(&(&sigma_t * a))).norm();
    Ok(KmsResiduals {
        upper,
        lower,
        scale: operator_norm(a) * operator_norm(b),
    })
}

pub fn kms_check(triple: &ModularTriple, a: &CMatrix, b: &CMatrix, t: f64, tol: Tolerance) -> Result<CheckReport> {
    let r = kms_residuals(triple, a, b, t, Continuation::Exact)?;
    Ok(CheckReport::new(
        format!("modular.kms.dim{}", triple.algebra.dim()),
        KMS_ANCHOR,
        r.max(),
        tol.bound(r.scale),
    )
    .with_note("upper_strip_edge", fmt_sci(r.upper))
    .with_note("lower_strip_edge", fmt_sci(r.lower))
    .with_note("condition_number", fmt_sci(triple.condition_number())))
}

/// `e^{-βH}/Z`, computed with the ground energy shifted out.
pub fn gibbs_state(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NonpositiveInput("inverse temperature"));
    }
    let spec = hermitian_eig(h, Tolerance::default())?;
    let e0 = spec.min();
    let weights: Vec<f64> = spec.values.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let weighted = Spectrum {
        values: weights.iter().map(|w| w / z).collect(),
        vectors: spec.vectors,
    };
    Ok(weighted.reconstruct())
}

/// Heisenberg evolution `τ_s(B) = e^{iHs/ħ} B e^{-iHs/ħ}` with complex `s`.
fn heisenberg(spec: &Spectrum, hbar: f64, s: C64, b: &CMatrix) -> CMatrix {
    let forward = spec.map(|e| (C64::i() * s * e / hbar).exp());
    let backward = spec.map(|e| (-C64::i() * s * e / hbar).exp());
    forward * b * backward
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsKmsResiduals {
    /// `|ω(A τ_{s+iβħ}(B)) − ω(τ_s(B) A)|`.
    pub upper: f64,
    /// `|ω(τ_{s−iβħ}(B) A) − ω(A τ_s(B))|`.
    pub lower: f64,
    /// `‖σ_t(A⊗1) − τ_{−βħt}(A)⊗1‖` in the standard form, when `cond(Δ)`
    /// is within the guard.
    pub modular_vs_heisenberg: Option<f64>,
    pub scale: f64,
}

impl GibbsKmsResiduals {
    pub fn max(&self) -> f64 {
        self.upper.max(self.lower).max(self.modular_vs_heisenberg.unwrap_or(0.0))
    }
}

pub fn gibbs_kms_residuals(
    h: &CMatrix,
    beta: f64,
    hbar: f64,
    a: &CMatrix,
    b: &CMatrix,
    s: f64,
) -> Result<GibbsKmsResiduals> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::NonpositiveInput("hbar"));
    }
    let rho = gibbs_state(h, beta)?;
    let spec = hermitian_eig(h, Tolerance::default())?;
    let omega = |x: &CMatrix| (&rho * x).trace();
    let b_s = heisenberg(&spec, hbar, c(s, 0.0), b);
    let b_up = heisenberg(&spec, hbar, c(s, beta * hbar), b);
    let b_down = heisenberg(&spec, hbar, c(s, -beta * hbar), b);
    let upper = (omega(&(a * &b_up)) - omega(&(&b_s * a))).norm();
    let lower = (omega(&(&b_down * a)) - omega(&(a * &b_s))).norm();

    let rho_spec = hermitian_eig(&rho, Tolerance::default())?;
    let modular_vs_heisenberg = if rho_spec.max() / rho_spec.min().max(f64::MIN_POSITIVE) <= CONDITION_GUARD.sqrt() {
        let sf = StandardForm::new(&rho)?;
        let triple = sf.triple()?;
        let t = s;
        let flowed = modular_flow(t, &triple, &sf.lift(a))?;
        let physical = sf.lift(&heisenberg(&spec, hbar, c(-beta * hbar * t, 0.0), a));
        Some(max_abs(&(flowed - physical)))
    } else {
        None
    };
    Ok(GibbsKmsResiduals {
        upper,
        lower,
        modular_vs_heisenberg,
        scale: operator_norm(a) * operator_norm(b),
    })
}

pub fn gibbs_kms_check(
    h: &CMatrix,
    beta: f64,
    hbar: f64,
    a: &CMatrix,
    b: &CMatrix,
    s: f64,
    tol: Tolerance,
) -> Result<CheckReport> {
    let r = gibbs_kms_residuals(h, beta, hbar, a, b, s)?;
    Ok(CheckReport::new(
        format!("modular.gibbs_kms.dim{}", h.nrows()),
        GIBBS_ANCHOR,
        r.max(),
        tol.bound(r.scale),
    )
    .with_note("upper_strip_edge", fmt_sci(r.upper))
    .with_note("lower_strip_edge", fmt_sci(r.lower))
    .with_note(
        "modular_vs_heisenberg",
        r.modular_vs_heisenberg
            .map(fmt_sci)
            .unwrap_or_else(|| "skipped: cond(Δ) above guard".into()),
    ))
}

/// `ω(R τ_s(L)) / ω(τ_s(L) R)` in the Gibbs state; `e^{−βE}` for a
/// lowering `L` and raising `R` across a gap `E`.
pub fn detailed_balance_ratio(
    h: &CMatrix,
    beta: f64,
    hbar: f64,
    lowering: &CMatrix,
    raising: &CMatrix,
    s: f64,
) -> Result<C64> {
    let rho = gibbs_state(h, beta)?;
    let spec = hermitian_eig(h, Tolerance::default())?;
    let l_s = heisenberg(&spec, hbar, c(s, 0.0), lowering);
    Ok((&rho * raising * &l_s).trace() / (&rho * &l_s * raising).trace())
}

/// Two faithful states on `M_d ⊗ 1` and the cocycle relating their flows.
#[derive(Debug, Clone)]
pub struct CocyclePair {
    pub first: ModularTriple,
    pub second: ModularTriple,
    relative: AntilinearPolar,
    lift_dim: usize,
}

impl CocyclePair {
    pub fn new(rho1: &CMatrix, rho2: &CMatrix) -> Result<Self> {
        if rho1.nrows() != rho2.nrows() {
            return Err(Error::DimensionMismatch {
                expected: rho1.nrows(),
                found: rho2.nrows(),
            });
        }
        let sf1 = StandardForm::new(rho1)?;
        let sf2 = StandardForm::new(rho2)?;
        let first = sf1.triple()?;
        let second = tomita_triple(&sf1.algebra, &sf2.omega)?;
        // S_21: A Ω₁ ↦ A† Ω₂, whose modulus is Δ_21 = ρ₂ ⊗ ρ₁⁻¹
        let s21 = relative_s_map(&sf1.algebra, &sf1.omega, &sf2.omega)?;
        let relative = antilinear_polar(&s21)?;
        Ok(Self {
            first,
            second,
            relative,
            lift_dim: rho1.nrows(),
        })
    }

    pub fn factor_dim(&self) -> usize {
        self.lift_dim
    }

    /// `u_t = Δ_21^{it} Δ_1^{-it}`.
    pub fn cocycle(&self, t: f64) -> Result<CMatrix> {
        if t == 0.0 {
            return Ok(identity(self.first.algebra.dim()));
        }
        let rel = self.relative.delta_power(c(0.0, t))?;
        let inv = self.first.delta_power(c(0.0, -t))?;
        Ok(rel * inv)
    }

    /// `max_A ‖σ²_t(A) − u_t σ¹_t(A) u_t†‖` over the closure basis.
    pub fn intertwining_residual(&self, t: f64) -> Result<f64> {
        let u = self.cocycle(t)?;
        let mut worst = 0.0f64;
        for a in self.first.algebra.closure() {
            let lhs = modular_flow(t, &self.second, a)?;
            let rhs = &u * modular_flow(t, &self.first, a)? * u.adjoint();
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
        Ok(worst)
    }

    /// `‖u_{t+s} − u_t σ¹_t(u_s)‖`.
    pub fn chain_residual(&self, t: f64, s: f64) -> Result<f64> {
        let lhs = self.cocycle(t + s)?;
        let rhs = self.cocycle(t)? * modular_flow(t, &self.first, &self.cocycle(s)?)?;
        Ok(max_abs(&(lhs - rhs)))
    }

    pub fn check(&self, t: f64, s: f64, tol: f64) -> Result<CheckReport> {
        let u = self.cocycle(t)?;
        let intertwining = self.intertwining_residual(t)?;
        let chain = self.chain_residual(t, s)?;
        let unitary = unitarity_error(&u);
        let membership = self.first.algebra.distance_to_closure(&u);
        let worst = intertwining.max(chain).max(unitary).max(membership);
        Ok(CheckReport::new(
            format!("modular.connes_cocycle.d{}", self.lift_dim),
            COCYCLE_ANCHOR,
            worst,
            tol,
        )
        .with_note("intertwining", fmt_sci(intertwining))
        .with_note("chain_rule", fmt_sci(chain))
        .with_note("unitarity", fmt_sci(unitary))
        .with_note("distance_to_algebra", fmt_sci(membership)))
    }
}

pub fn connes_cocycle(rho1: &CMatrix, rho2: &CMatrix, t: f64) -> Result<CMatrix> {
    CocyclePair::new(rho1, rho2)?.cocycle(t)
}

/// Uniform-acceleration thermal data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParameters {
    /// Boost rapidity `aτ/c` reached at proper time `τ`.
    pub rapidity: f64,
    /// Proper-time KMS period `2πc/a`.
    pub beta_tau: f64,
    pub temperature: f64,
    pub accel: f64,
    pub constants: PhysicalConstants,
}

impl ThermalParameters {
    /// `|T β_τ − ħ/k_B| / (ħ/k_B)`.
    pub fn consistency_residual(&self) -> f64 {
        let target = self.constants.hbar / self.constants.k_b;
        (self.temperature * self.beta_tau - target).abs() / target
    }

    pub fn rapidity_rate(&self) -> f64 {
        self.accel / self.constants.c
    }
}

pub fn unruh_chain(accel: f64, constants: PhysicalConstants, tau: f64) -> Result<ThermalParameters> {
    if !(accel.is_finite() && accel > 0.0) {
        return Err(Error::NonpositiveInput("acceleration"));
    }
    if !(constants.hbar > 0.0 && constants.c > 0.0 && constants.k_b > 0.0) {
        return Err(Error::NonpositiveInput("physical constants"));
    }
    if !tau.is_finite() {
        return Err(Error::NonFinite);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(ThermalParameters {
        rapidity: accel * tau / constants.c,
        beta_tau: two_pi * constants.c / accel,
        temperature: constants.hbar * accel / (two_pi * constants.c * constants.k_b),
        accel,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag_real;
    use crate::random::{random_complex, random_density, random_unit_vector, seeded};
    use proptest::prelude::*;

    fn qubit_rho() -> CMatrix {
        diag_real(&[0.75, 0.25])
    }

    fn lifted_random(sf: &StandardForm, seed: u64) -> CMatrix {
        sf.lift(&random_complex(sf.factor_dim(), &mut seeded(seed)))
    }

    /// Rank by Gaussian elimination with partial pivoting.
    fn elimination_rank(m: &CMatrix, tol: f64) -> usize {
        let mut a = m.clone();
        let (rows, cols) = a.shape();
        let scale = max_abs(&a).max(f64::MIN_POSITIVE);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let pivot = (rank..rows)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            if a[(pivot, col)].norm() <= tol * scale {
                continue;
            }
            a.swap_rows(rank, pivot);
            for r in rank + 1..rows {
                let f = a[(r, col)] / a[(rank, col)];
                for k in col..cols {
                    let sub = a[(rank, k)] * f;
                    a[(r, k)] -= sub;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn closure_of_single_qubit_factor() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        assert_eq!(sf.algebra.closure().len(), 4);
        assert_eq!(sf.algebra.commutant().unwrap().len(), 4);
        assert!(sf.algebra.closure_defect() < 1e-12);
        assert!(sf.algebra.double_commutant_residual().unwrap() < 1e-10);
    }

    #[test]
    fn closure_of_ladder_algebra_is_full() {
        let fock = crate::fock::TruncatedFock::new(3, crate::fock::HbarScale::natural()).unwrap();
        let alg = FiniteAlgebra::generate(vec![fock.annihilator()]).unwrap();
        assert_eq!(alg.closure().len(), 9);
        assert_eq!(alg.commutant().unwrap().len(), 1);
    }

    #[test]
    fn abelian_algebra_closure() {
        let alg = FiniteAlgebra::generate(vec![diag_real(&[1.0, 2.0, 2.0])]).unwrap();
        assert_eq!(alg.closure().len(), 2);
        // commutant of diag(1,2,2) is M_1 ⊕ M_2
        assert_eq!(alg.commutant().unwrap().len(), 5);
        assert!(alg.double_commutant_residual().unwrap() < 1e-10);
    }

    #[test]
    fn gns_pure_and_mixed() {
        let pure = diag_real(&[1.0, 0.0]);
        assert_eq!(gns_construct(&pure).unwrap().rep_space_dim(), 2);
        let mixed = diag_real(&[0.5, 0.5]);
        assert_eq!(gns_construct(&mixed).unwrap().rep_space_dim(), 4);
        assert!(matches!(gns_construct(&diag_real(&[0.5, 0.6])), Err(Error::NotAState(_))));
        assert!(matches!(gns_construct(&diag_real(&[1.5, -0.5])), Err(Error::NotAState(_))));
    }

    #[test]
    fn gns_reproduces_state() {
        let mut rng = seeded(3);
        for rho in [random_density(3, &mut rng), diag_real(&[1.0, 0.0, 0.0])] {
            let gns = gns_construct(&rho).unwrap();
            assert!((gns.omega().norm() - 1.0).abs() < 1e-12);
            for _ in 0..20 {
                let a = random_complex(3, &mut rng);
                assert!((gns.state_value(&a) - gns.expectation(&a)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gns_is_a_representation() {
        let mut rng = seeded(8);
        let gns = gns_construct(&random_density(2, &mut rng)).unwrap();
        let a = random_complex(2, &mut rng);
        let b = random_complex(2, &mut rng);
        let lhs = gns.represent(&(&a * &b));
        let rhs = gns.represent(&a) * gns.represent(&b);
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
        assert!(max_abs(&(gns.represent(&a.adjoint()) - gns.represent(&a).adjoint())) < 1e-12);
    }

    #[test]
    fn standard_form_closure_matches_word_search() {
        let sf = StandardForm::new(&random_density(3, &mut seeded(5))).unwrap();
        let searched = FiniteAlgebra::generate(sf.algebra.generators().to_vec()).unwrap();
        assert_eq!(sf.algebra.closure().len(), 9);
        assert!(span_equality_residual(sf.algebra.closure(), searched.closure()) < 1e-10);
        assert!(sf.algebra.closure_defect() < 1e-10);
    }

    #[test]
    fn standard_form_vector_is_cyclic_and_separating() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        let cs = cyclic_separating_check(&sf.algebra, &sf.omega).unwrap();
        assert!(cs.cyclic && cs.separating);
    }

    #[test]
    fn product_vector_fails_with_witnesses() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        let mut v = CVector::zeros(4);
        v[0] = c(1.0, 0.0);
        let cs = cyclic_separating_check(&sf.algebra, &v).unwrap();
        assert!(!cs.cyclic && !cs.separating);
        assert_eq!(cs.orbit_rank, 2);
        let w = cs.separating_witness.unwrap();
        assert!(frobenius(&w) > 0.5);
        assert!((&w * &v).norm() < 1e-12);
        let x = cs.cyclic_witness.unwrap();
        for a in sf.algebra.closure() {
            assert!(x.dotc(&(a * &v)).norm() < 1e-12);
        }
    }

    #[test]
    fn fock_vacuum_not_separating() {
        let fock = crate::fock::TruncatedFock::new(4, crate::fock::HbarScale::natural()).unwrap();
        let alg = FiniteAlgebra::generate(vec![fock.annihilator()]).unwrap();
        let cs = cyclic_separating_check(&alg, &fock.vacuum()).unwrap();
        assert!(cs.cyclic);
        assert!(!cs.separating);
        let w = cs.separating_witness.unwrap();
        assert!((&w * fock.vacuum()).norm() < 1e-12);
    }

    #[test]
    fn cyclic_separating_matches_elimination_oracle() {
        let mut rng = seeded(31);
        for n in [2usize, 3, 4] {
            let algebras = vec![
                FiniteAlgebra::generate(vec![random_complex(n, &mut rng)]).unwrap(),
                FiniteAlgebra::generate(vec![diag_real(&(0..n).map(|k| (k % 2) as f64).collect::<Vec<_>>())]).unwrap(),
            ];
            for alg in &algebras {
                for trial in 0..4 {
                    let v = if trial == 0 {
                        let mut e = CVector::zeros(n);
                        e[0] = c(1.0, 0.0);
                        e
                    } else {
                        random_unit_vector(n, &mut rng)
                    };
                    let cs = cyclic_separating_check(alg, &v).unwrap();
                    let e = evaluation_matrix(alg, &v);
                    let rank = elimination_rank(&e, 1e-9);
                    assert_eq!(cs.cyclic, rank == n);
                    assert_eq!(cs.separating, rank == alg.closure().len());
                }
            }
        }
        // dimension 16: standard forms of 4×4 densities
        let sf = StandardForm::new(&random_density(4, &mut rng)).unwrap();
        let cs = cyclic_separating_check(&sf.algebra, &sf.omega).unwrap();
        let rank = elimination_rank(&evaluation_matrix(&sf.algebra, &sf.omega), 1e-9);
        assert_eq!(rank, 16);
        assert!(cs.cyclic && cs.separating);
    }

    #[test]
    fn orbit_dimension_of_vacuum_under_ladder() {
        let fock = crate::fock::TruncatedFock::new(5, crate::fock::HbarScale::natural()).unwrap();
        let a = fock.annihilator();
        assert_eq!(orbit_dimension(&[a.adjoint(), a.clone()], &fock.vacuum(), 1e-10), 5);
        assert_eq!(orbit_dimension(&[a], &fock.vacuum(), 1e-10), 1);
    }

    #[test]
    fn qubit_delta_spectrum() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        let triple = sf.triple().unwrap();
        let spec = &triple.delta_spectrum().values;
        let expected = [1.0 / 3.0, 1.0, 1.0, 3.0];
        for (a, b) in spec.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{spec:?}");
        }
        assert!(triple.residuals().unwrap().max() < 1e-10);
    }

    #[test]
    fn delta_is_rho_tensor_rho_inverse() {
        let mut rng = seeded(17);
        let rho = random_density(3, &mut rng);
        let sf = StandardForm::new(&rho).unwrap();
        let triple = sf.triple().unwrap();
        let rho_inv = rho.clone().try_inverse().unwrap();
        let expected = kron(&rho, &rho_inv.transpose());
        assert!(max_abs(&(&triple.delta - expected)) < 1e-10);
    }

    #[test]
    fn tracial_state_has_trivial_modular_data() {
        let sf = StandardForm::new(&diag_real(&[0.5, 0.5])).unwrap();
        let triple = sf.triple().unwrap();
        assert!(max_abs(&(&triple.delta - identity(4))) < 1e-12);
        assert!(max_abs(&(&triple.s.linear - &triple.j.linear)) < 1e-12);
        let a = lifted_random(&sf, 2);
        for t in [0.3, 1.7] {
            assert!(max_abs(&(modular_flow(t, &triple, &a).unwrap() - &a)) < 1e-12);
        }
    }

    #[test]
    fn modular_flow_basics() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        let triple = sf.triple().unwrap();
        let a = lifted_random(&sf, 5);
        assert!(max_abs(&(modular_flow(0.0, &triple, &a).unwrap() - &a)) < 1e-14);
        assert!(max_abs(&(modular_flow(1.3, &triple, &identity(4)).unwrap() - identity(4))) < 1e-13);
        let ts = modular_flow(0.4, &triple, &modular_flow(0.9, &triple, &a).unwrap()).unwrap();
        assert!(max_abs(&(ts - modular_flow(1.3, &triple, &a).unwrap())) < 1e-12);
        assert!(triple.flow_preservation_residual(&[0.1, 0.7, 2.0]).unwrap() < 1e-10);
        let outside = kron(&identity(2), &random_complex(2, &mut seeded(1)));
        assert!(matches!(modular_flow(0.1, &triple, &outside), Err(Error::NotInAlgebra { .. })));
    }

    #[test]
    fn flow_matches_density_conjugation() {
        let rho = random_density(3, &mut seeded(23));
        let sf = StandardForm::new(&rho).unwrap();
        let triple = sf.triple().unwrap();
        let a = random_complex(3, &mut seeded(24));
        let t = 0.6;
        let spec = hermitian_eig(&rho, Tolerance::default()).unwrap();
        let expected = spec.power(c(0.0, t)).unwrap() * &a * spec.power(c(0.0, -t)).unwrap();
        let flowed = modular_flow(t, &triple, &sf.lift(&a)).unwrap();
        assert!(max_abs(&(flowed - sf.lift(&expected))) < 1e-10);
    }

    #[test]
    fn kms_qubit_and_negative_control() {
        let sf = StandardForm::new(&qubit_rho()).unwrap();
        let triple = sf.triple().unwrap();
        let one = identity(4);
        let trivial = kms_residuals(&triple, &one, &one, 0.0, Continuation::Exact).unwrap();
        assert!(trivial.max() < 1e-14);
        let mut rng = seeded(21);
        let a = sf.lift(&random_complex(2, &mut rng));
        let b = sf.lift(&random_complex(2, &mut rng));
        assert!(kms_residuals(&triple, &a, &b, 0.7, Continuation::Exact).unwrap().max() < 1e-10);
        assert!(kms_residuals(&triple, &a, &b, 0.7, Continuation::Corrupted).unwrap().upper > 1e-3);
    }

    #[test]
    fn kms_guard_rejects_ill_conditioned() {
        let sf = {
            // cond(Δ) = (λ₀/λ₁)² ≈ 10^12.5: above the guard, still decomposable
            let small = 10f64.powf(-6.25);
            StandardForm::new(&diag_real(&[1.0 / (1.0 + small), small / (1.0 + small)])).unwrap()
        };
        let triple = sf.triple().unwrap();
        assert!(matches!(
            kms_residuals(&triple, &identity(4), &identity(4), 0.0, Continuation::Exact),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn singular_state_rejected() {
        assert!(matches!(
            StandardForm::new(&diag_real(&[1.0, 0.0])),
            Err(Error::SingularState { .. })
        ));
        assert!(matches!(
            CocyclePair::new(&diag_real(&[1.0, 0.0]), &qubit_rho()),
            Err(Error::SingularState { .. })
        ));
    }

    #[test]
    fn gibbs_oscillator_kms() {
        let fock = crate::fock::TruncatedFock::new(8, crate::fock::HbarScale::natural()).unwrap();
        let h = crate::fock::number_operator(&fock);
        let a = fock.annihilator();
        let r = gibbs_kms_residuals(&h, 2.0, 1.0, &a, &a.adjoint(), 0.4).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
        let r = gibbs_kms_residuals(&h, 0.5, 1.0, &a, &a.adjoint(), 0.4).unwrap();
        assert!(r.modular_vs_heisenberg.unwrap() < 1e-9, "{r:?}");
    }

    #[test]
    fn gibbs_infinite_temperature_is_tracial() {
        let h = diag_real(&[0.0, 1.0, 3.0]);
        let rho = gibbs_state(&h, 1e-6).unwrap();
        let sf = StandardForm::new(&rho).unwrap();
        let triple = sf.triple().unwrap();
        assert!(max_abs(&(&triple.delta - identity(9))) < 1e-5);
    }

    #[test]
    fn detailed_balance_qubit() {
        let e = 1.3;
        let beta = 0.8;
        let h = diag_real(&[0.0, e]);
        let mut lower = CMatrix::zeros(2, 2);
        lower[(0, 1)] = c(1.0, 0.0);
        let raise = lower.adjoint();
        let ratio = detailed_balance_ratio(&h, beta, 1.0, &lower, &raise, 0.37).unwrap();
        assert!((ratio - c((-beta * e).exp(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn cocycle_examples() {
        let pair = CocyclePair::new(&qubit_rho(), &diag_real(&[0.5, 0.5])).unwrap();
        assert_eq!(pair.cocycle(0.0).unwrap(), identity(4));
        assert!(pair.intertwining_residual(0.3).unwrap() < 1e-9);
        assert!(pair.chain_residual(0.3, 0.5).unwrap() < 1e-9);
        let same = CocyclePair::new(&qubit_rho(), &qubit_rho()).unwrap();
        for t in [0.2, 1.1] {
            assert!(max_abs(&(same.cocycle(t).unwrap() - identity(4))) < 1e-12);
        }
    }

    #[test]
    fn cocycle_is_rho_ratio() {
        let mut rng = seeded(41);
        let r1 = random_density(3, &mut rng);
        let r2 = random_density(3, &mut rng);
        let pair = CocyclePair::new(&r1, &r2).unwrap();
        let t = 0.45;
        let p1 = complex_power_of(&r1, c(0.0, -t));
        let p2 = complex_power_of(&r2, c(0.0, t));
        let expected = kron(&(p2 * p1), &identity(3));
        assert!(max_abs(&(pair.cocycle(t).unwrap() - expected)) < 1e-10);
        assert!(pair.check(t, 0.8, 1e-8).unwrap().passed);
    }

    fn complex_power_of(m: &CMatrix, z: C64) -> CMatrix {
        crate::linalg::complex_power(m, z).unwrap()
    }

    #[test]
    fn unruh_examples() {
        let nat = unruh_chain(2.0 * std::f64::consts::PI, PhysicalConstants::NATURAL, 1.0).unwrap();
        assert!((nat.temperature - 1.0).abs() < 1e-12);
        assert!((nat.beta_tau - 1.0).abs() < 1e-12);
        let si = PhysicalConstants::si();
        let p = unruh_chain(9.81, si, 0.0).unwrap();
        assert!((p.temperature - 3.98e-20).abs() < 0.01e-20, "{}", p.temperature);
        let doubled = unruh_chain(19.62, si, 0.0).unwrap();
        assert!((doubled.temperature / p.temperature - 2.0).abs() < 1e-12);
        assert!((doubled.beta_tau / p.beta_tau - 0.5).abs() < 1e-12);
        assert!(p.consistency_residual() < 1e-12);
        assert!(matches!(unruh_chain(0.0, si, 0.0), Err(Error::NonpositiveInput(_))));
        assert!(unruh_chain(-1.0, si, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn triple_invariants_on_random_qutrits(seed in 0u64..10_000) {
            let rho = random_density(3, &mut seeded(seed));
            let triple = StandardForm::new(&rho).unwrap().triple().unwrap();
            prop_assert!(triple.residuals().unwrap().max() < 1e-9);
            prop_assert!(triple.flow_preservation_residual(&[0.1, 0.7, 2.0]).unwrap() < 1e-8);
        }

        #[test]
        fn kms_on_random_qubits(seed in 0u64..10_000, t in -2.0f64..2.0) {
            let mut rng = seeded(seed);
            let sf = StandardForm::new(&random_density(2, &mut rng)).unwrap();
            let triple = sf.triple().unwrap();
            prop_assume!(triple.condition_number() < 1e6);
            let a = sf.lift(&random_complex(2, &mut rng));
            let b = sf.lift(&random_complex(2, &mut rng));
            let r = kms_residuals(&triple, &a, &b, t, Continuation::Exact).unwrap();
            prop_assert!(r.max() < 1e-9 * r.scale.max(1.0));
        }

        #[test]
        fn cocycle_chain_rule(seed in 0u64..10_000, t in -1.0f64..1.0, s in -1.0f64..1.0) {
            let mut rng = seeded(seed);
            let pair = CocyclePair::new(&random_density(2, &mut rng), &random_density(2, &mut rng)).unwrap();
            prop_assert!(pair.chain_residual(t, s).unwrap() < 1e-8);
            prop_assert!(pair.intertwining_residual(t).unwrap() < 1e-8);
        }
    }
}
