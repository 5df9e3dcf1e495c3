//! Classical layer: dispersion, mode amplitudes and their flow, phase-space
//! Galilei action, Fourier bandwidth–duration, and Jones polarization.
//!
//! Nothing here takes a Planck-constant argument.

use std::io::Read;

use num_rational::Rational64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, hermitian_eig, identity, max_abs, CMatrix, CVector, Tolerance, C64};
use crate::photon::ModeLabel;
use crate::report::{fmt_sci, CheckReport};

pub const DISPERSION_ANCHOR: &str = "null-cone dispersion ω = c|k|";
pub const KG_ANCHOR: &str = "Klein–Gordon inner product, positive on positive-frequency solutions";
pub const POISSON_ANCHOR: &str = "canonical Poisson bracket {a_k, ā_k′} = −iδ_kk′";
pub const GALILEI_ANCHOR: &str = "Galilei action on phase space preserves the symplectic form";
pub const EVOLUTION_ANCHOR: &str = "classical mode amplitudes rotate as e^{−iωt}";
pub const FOURIER_ANCHOR: &str = "bandwidth–duration inequality Δt·Δω ≥ 1/2";
pub const BORN_ANCHOR: &str = "Born rule p_i = ⟨ψ|E_i|ψ⟩ for a POVM";
pub const PROJECTOR_ANCHOR: &str = "polarization projectors onto non-orthogonal bases do not commute";

/// Minimum sample count for a bandwidth–duration evaluation.
pub const MIN_ENVELOPE_SAMPLES: usize = 64;

/// `ω = c|k|`.
pub fn dispersion(wavevector: [f64; 3], c_speed: f64) -> f64 {
    c_speed * norm3(wavevector)
}

/// `ω²/c² − |k|²` for the dispersion above.
pub fn null_cone_residual(wavevector: [f64; 3], c_speed: f64) -> f64 {
    let omega = dispersion(wavevector, c_speed);
    (omega / c_speed).powi(2) - wavevector.iter().map(|k| k * k).sum::<f64>()
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Complex amplitude per mode, in the order of the mode list it goes with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalModeState {
    pub amplitudes: Vec<C64>,
}

impl ClassicalModeState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { amplitudes })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn check_len(&self, expected: usize) -> Result<()> {
        if self.amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: self.amplitudes.len(),
            });
        }
        Ok(())
    }
}

/// `Σ conj(u_k) v_k`.
pub fn kg_inner(u: &ClassicalModeState, v: &ClassicalModeState) -> Result<C64> {
    v.check_len(u.len())?;
    Ok(u.amplitudes
        .iter()
        .zip(&v.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// `a_k(t) = e^{−iω_k t} a_k(0)`.
pub fn evolve_classical(u: &ClassicalModeState, modes: &[ModeLabel], t: f64) -> Result<ClassicalModeState> {
    u.check_len(modes.len())?;
    let amplitudes = u
        .amplitudes
        .iter()
        .zip(modes)
        .map(|(a, m)| a * C64::from_polar(1.0, -m.frequency() * t))
        .collect();
    Ok(ClassicalModeState { amplitudes })
}

/// `Σ ω_k |a_k|²`.
pub fn classical_energy(u: &ClassicalModeState, modes: &[ModeLabel]) -> Result<f64> {
    u.check_len(modes.len())?;
    Ok(u.amplitudes
        .iter()
        .zip(modes)
        .map(|(a, m)| m.frequency() * a.norm_sqr())
        .sum())
}

/// `Σ σ_k |a_k|²`, the mode-sum form of the classical spin.
pub fn classical_helicity(u: &ClassicalModeState, modes: &[ModeLabel]) -> Result<f64> {
    u.check_len(modes.len())?;
    Ok(u.amplitudes
        .iter()
        .zip(modes)
        .map(|(a, m)| m.helicity().sign() * a.norm_sqr())
        .sum())
}

/// Exact Gaussian rational `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GaussRational {
    re: Rational64,
    im: Rational64,
}

impl GaussRational {
    const ZERO: Self = Self::int(0, 0);

    const fn int(re: i64, im: i64) -> Self {
        Self {
            re: Rational64::new_raw(re, 1),
            im: Rational64::new_raw(im, 1),
        }
    }

    fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn sub(self, o: Self) -> Self {
        self.add(Self { re: -o.re, im: -o.im })
    }

    fn scale(self, r: Rational64) -> Self {
        Self {
            re: self.re * r,
            im: self.im * r,
        }
    }

    fn to_c64(self) -> C64 {
        c(
            *self.re.numer() as f64 / *self.re.denom() as f64,
            *self.im.numer() as f64 / *self.im.denom() as f64,
        )
    }
}

/// Linear phase-space function `2^{-half_powers/2} Σ (α_j q_j + β_j p_j)`.
#[derive(Debug, Clone, PartialEq)]
struct LinearForm {
    q: Vec<GaussRational>,
    p: Vec<GaussRational>,
    half_powers: u32,
}

impl LinearForm {
    /// `a_k = (q_k + i p_k)/√2`.
    fn amplitude(k: usize, n: usize) -> Self {
        let mut q = vec![GaussRational::ZERO; n];
        let mut p = vec![GaussRational::ZERO; n];
        q[k] = GaussRational::int(1, 0);
        p[k] = GaussRational::int(0, 1);
        Self { q, p, half_powers: 1 }
    }

    fn conj(&self) -> Self {
        Self {
            q: self.q.iter().map(|x| x.conj()).collect(),
            p: self.p.iter().map(|x| x.conj()).collect(),
            half_powers: self.half_powers,
        }
    }
}

/// `{f, g} = Σ_j (∂_q f ∂_p g − ∂_p f ∂_q g)`, exact when the √2 powers pair up.
fn poisson_bracket(f: &LinearForm, g: &LinearForm) -> Option<GaussRational> {
    let total = f.half_powers + g.half_powers;
    if total % 2 != 0 {
        return None;
    }
    let mut acc = GaussRational::ZERO;
    for j in 0..f.q.len() {
        acc = acc.add(f.q[j].mul(g.p[j]).sub(f.p[j].mul(g.q[j])));
    }
    Some(acc.scale(Rational64::new(1, 1i64 << (total / 2))))
}

/// Exact check of `{a_k, ā_k′} = −iδ_kk′` and `{a_k, a_k′} = 0` over
/// `n_modes` modes.
pub fn poisson_bracket_check(n_modes: usize, tol: Tolerance) -> CheckReport {
    let minus_i = GaussRational::int(0, -1);
    let mut mismatches = 0usize;
    let mut worst = 0.0f64;
    for k in 0..n_modes {
        for kp in 0..n_modes {
            let a = LinearForm::amplitude(k, n_modes);
            let b = LinearForm::amplitude(kp, n_modes);
            let cross = poisson_bracket(&a, &b.conj()).expect("paired √2 powers");
            let same = poisson_bracket(&a, &b).expect("paired √2 powers");
            let expected = if k == kp { minus_i } else { GaussRational::ZERO };
            for (got, want) in [(cross, expected), (same, GaussRational::ZERO)] {
                if got != want {
                    mismatches += 1;
                    worst = worst.max((got.to_c64() - want.to_c64()).norm());
                }
            }
        }
    }
    CheckReport::new(
        format!("scaffold.poisson_bracket.modes{n_modes}"),
        POISSON_ANCHOR,
        worst,
        tol.absolute,
    )
    .with_note("exact_mismatches", mismatches)
}

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    std::array::from_fn(|i| (0..3).map(|j| m[i][j] * v[j]).sum())
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn add3(a: Vec3, b: Vec3) -> Vec3 {
    std::array::from_fn(|i| a[i] + b[i])
}

fn scale3(a: Vec3, s: f64) -> Vec3 {
    a.map(|x| x * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: Vec3,
    pub p: Vec3,
    pub mass: f64,
}

impl PhasePoint {
    pub fn new(q: Vec3, p: Vec3, mass: f64) -> Result<Self> {
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonpositiveInput("mass"));
        }
        Ok(Self { q, p, mass })
    }

    fn coords(&self) -> [f64; 6] {
        [self.q[0], self.q[1], self.q[2], self.p[0], self.p[1], self.p[2]]
    }

    fn with_coords(&self, x: [f64; 6]) -> Self {
        Self {
            q: [x[0], x[1], x[2]],
            p: [x[3], x[4], x[5]],
            mass: self.mass,
        }
    }
}

/// Galilei group element `(a, v, R, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalileiElement {
    pub translation: Vec3,
    pub boost: Vec3,
    pub rotation: Mat3,
    pub time_shift: f64,
}

impl GalileiElement {
    pub fn new(translation: Vec3, boost: Vec3, rotation: Mat3, time_shift: f64) -> Result<Self> {
        let g = Self {
            translation,
            boost,
            rotation,
            time_shift,
        };
        let orth = g.orthogonality_error();
        if !(orth <= 1e-12) {
            return Err(Error::InvalidInput(format!("rotation is not orthogonal (error {orth:.3e})")));
        }
        if g.determinant() <= 0.0 {
            return Err(Error::InvalidInput("rotation has determinant −1".into()));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self {
            translation: [0.0; 3],
            boost: [0.0; 3],
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            time_shift: 0.0,
        }
    }

    /// Rotation from a (not necessarily normalized) quaternion `(w, x, y, z)`.
    pub fn rotation_from_quaternion(quat: [f64; 4]) -> Mat3 {
        let n = quat.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [w, x, y, z] = quat.map(|v| v / n);
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    pub fn orthogonality_error(&self) -> f64 {
        let r = &self.rotation;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let r = &self.rotation;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// `self ∘ first`: acting with the result equals acting with `first`
    /// and then with `self`.
    pub fn compose(&self, first: &GalileiElement) -> GalileiElement {
        let rotation = mat_mul(&self.rotation, &first.rotation);
        let rotated_boost = mat_vec(&self.rotation, first.boost);
        let boost = add3(rotated_boost, self.boost);
        let time_shift = self.time_shift + first.time_shift;
        // a − vτ must equal R₂a₁ + a₂ − R₂v₁τ₁ − v₂τ₂
        let offset = add3(
            add3(mat_vec(&self.rotation, first.translation), self.translation),
            add3(scale3(rotated_boost, -first.time_shift), scale3(self.boost, -self.time_shift)),
        );
        GalileiElement {
            translation: add3(offset, scale3(boost, time_shift)),
            boost,
            rotation,
            time_shift,
        }
    }
}

/// `(q, p) ↦ (Rq + v(t − τ) + a, Rp + mv)`.
pub fn galilei_act(x: &PhasePoint, g: &GalileiElement, t: f64) -> PhasePoint {
    let q = add3(
        add3(mat_vec(&g.rotation, x.q), scale3(g.boost, t - g.time_shift)),
        g.translation,
    );
    let p = add3(mat_vec(&g.rotation, x.p), scale3(g.boost, x.mass));
    PhasePoint { q, p, mass: x.mass }
}

/// Jacobian of the action at `x` by central differences.
pub fn galilei_jacobian(x: &PhasePoint, g: &GalileiElement, t: f64) -> [[f64; 6]; 6] {
    let h = 1e-3;
    let base = x.coords();
    let mut jac = [[0.0; 6]; 6];
    for j in 0..6 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += h;
        minus[j] -= h;
        let fp = galilei_act(&x.with_coords(plus), g, t).coords();
        let fm = galilei_act(&x.with_coords(minus), g, t).coords();
        for i in 0..6 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// `max |JᵀΩJ − Ω|` for the standard form `Ω = [[0, 1], [−1, 0]]`.
pub fn symplectic_residual(jac: &[[f64; 6]; 6]) -> f64 {
    let omega = |i: usize, j: usize| -> f64 {
        if j == i + 3 && i < 3 {
            1.0
        } else if i == j + 3 && j < 3 {
            -1.0
        } else {
            0.0
        }
    };
    let mut worst = 0.0f64;
    for a in 0..6 {
        for b in 0..6 {
            let mut s = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    s += jac[i][a] * omega(i, j) * jac[j][b];
                }
            }
            worst = worst.max((s - omega(a, b)).abs());
        }
    }
    worst
}

/// Complex envelope on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledEnvelope {
    pub samples: Vec<C64>,
    pub dt: f64,
}

impl SampledEnvelope {
    pub fn new(samples: Vec<C64>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::NonpositiveInput("sample spacing"));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { samples, dt })
    }

    /// Samples `f(t_k)` at `t_k = k·dt`.
    pub fn from_fn(n: usize, dt: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new((0..n).map(|k| f(k as f64 * dt)).collect(), dt)
    }

    /// Reads rows `t, re, im`; a non-numeric first row is taken as a header
    /// and `#` starts a comment.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
            if record.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "csv row {}: expected 3 fields (t, re, im), found {}",
                    row + 1,
                    record.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => {
                    times.push(v[0]);
                    samples.push(c(v[1], v[2]));
                }
                Err(_) if row == 0 => continue,
                Err(e) => return Err(Error::InvalidInput(format!("csv row {}: {e}", row + 1))),
            }
        }
        if times.len() < 2 {
            return Err(Error::InvalidInput("csv needs at least two samples".into()));
        }
        let dt = times[1] - times[0];
        let uniform = times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
        if !uniform {
            return Err(Error::InvalidInput("time column is not uniformly spaced".into()));
        }
        Self::new(samples, dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthDuration {
    pub dt_rms: f64,
    pub dw_rms: f64,
    pub product: f64,
}

/// Centroid-subtracted RMS spread of `x` weighted by `w`.
fn rms_spread(x: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let mean: f64 = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / total;
    let var: f64 = x.iter().zip(w).map(|(x, w)| (x - mean).powi(2) * w).sum::<f64>() / total;
    var.max(0.0).sqrt()
}

/// Signed angular frequencies of a length-`n` DFT with spacing `dt`.
pub fn dft_angular_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let span = n as f64 * dt;
    (0..n)
        .map(|k| {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * std::f64::consts::PI * signed / span
        })
        .collect()
}

pub fn bandwidth_duration(env: &SampledEnvelope) -> Result<BandwidthDuration> {
    let n = env.samples.len();
    if n < MIN_ENVELOPE_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "envelope has {n} samples, at least {MIN_ENVELOPE_SAMPLES} needed"
        )));
    }
    let time_weights: Vec<f64> = env.samples.iter().map(|z| z.norm_sqr()).collect();
    if time_weights.iter().sum::<f64>() == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let times: Vec<f64> = (0..n).map(|k| k as f64 * env.dt).collect();
    let dt_rms = rms_spread(&times, &time_weights);

    let mut spectrum = env.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let freq_weights: Vec<f64> = spectrum.iter().map(|z| z.norm_sqr()).collect();
    let dw_rms = rms_spread(&dft_angular_frequencies(n, env.dt), &freq_weights);
    Ok(BandwidthDuration {
        dt_rms,
        dw_rms,
        product: dt_rms * dw_rms,
    })
}

/// `product ≥ 1/2 − 5/samples`.
pub fn bandwidth_duration_check(name: &str, env: &SampledEnvelope) -> Result<CheckReport> {
    let bd = bandwidth_duration(env)?;
    let bound = 0.5 - 5.0 / env.samples.len() as f64;
    Ok(CheckReport::lower_bound(format!("scaffold.bandwidth_duration.{name}"), FOURIER_ANCHOR, bd.product, bound)
        .with_note("dt_rms", fmt_sci(bd.dt_rms))
        .with_note("dw_rms", fmt_sci(bd.dw_rms))
        .with_note("product", fmt_sci(bd.product)))
}

/// Polarization state in the `(H, V)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    pub components: [C64; 2],
}

impl JonesVector {
    pub fn new(h: C64, v: C64) -> Self {
        Self { components: [h, v] }
    }

    pub fn horizontal() -> Self {
        Self::new(c(1.0, 0.0), c(0.0, 0.0))
    }

    pub fn vertical() -> Self {
        Self::new(c(0.0, 0.0), c(1.0, 0.0))
    }

    /// `(1, −i)/√2`.
    pub fn right() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(c(s, 0.0), c(0.0, -s))
    }

    /// `(1, +i)/√2`.
    pub fn left() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(c(s, 0.0), c(0.0, s))
    }

    /// `(1, 1)/√2`.
    pub fn diagonal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(c(s, 0.0), c(s, 0.0))
    }

    pub fn norm(&self) -> f64 {
        (self.components[0].norm_sqr() + self.components[1].norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidInput("Jones vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            components: self.components.map(|z| z / n),
        })
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.components)
    }

    /// `|ψ⟩⟨ψ|` of the normalized vector.
    pub fn projector(&self) -> Result<CMatrix> {
        let v = self.normalized()?.to_vector();
        Ok(&v * v.adjoint())
    }
}

/// `p_i = ⟨ψ|E_i|ψ⟩` for a normalized `ψ` and a validated POVM.
pub fn born_probability(state: &JonesVector, effects: &[CMatrix]) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-10;
    if effects.is_empty() {
        return Err(Error::NotAPovm("no effects".into()));
    }
    let mut total = CMatrix::zeros(2, 2);
    for (i, e) in effects.iter().enumerate() {
        if e.shape() != (2, 2) {
            return Err(Error::NotAPovm(format!("effect {i} is not 2×2")));
        }
        let spec = hermitian_eig(e, Tolerance::absolute(TOL))
            .map_err(|_| Error::NotAPovm(format!("effect {i} is not Hermitian")))?;
        if spec.min() < -TOL {
            return Err(Error::NotAPovm(format!("effect {i} has eigenvalue {:.3e}", spec.min())));
        }
        total += e;
    }
    let completeness = max_abs(&(total - identity(2)));
    if completeness > TOL {
        return Err(Error::NotAPovm(format!("effects sum to identity only within {completeness:.3e}")));
    }
    let v = state.normalized()?.to_vector();
    Ok(effects.iter().map(|e| v.dotc(&(e * &v)).re).collect())
}

/// Three-outcome symmetric POVM `{⅔|ψ_j⟩⟨ψ_j|}` with linear polarizations at 0°, 60°, 120°.
pub fn trine_povm() -> Vec<CMatrix> {
    (0..3)
        .map(|j| {
            let angle = j as f64 * std::f64::consts::PI / 3.0;
            let psi = JonesVector::new(c(angle.cos(), 0.0), c(angle.sin(), 0.0));
            psi.projector().expect("unit vector") * c(2.0 / 3.0, 0.0)
        })
        .collect()
}

/// `‖[P_H, P_D]‖` (largest entry).
pub fn projector_noncommutativity() -> f64 {
    let ph = JonesVector::horizontal().projector().expect("unit vector");
    let pd = JonesVector::diagonal().projector().expect("unit vector");
    max_abs(&commutator(&ph, &pd))
}

pub fn projector_noncommutativity_check() -> CheckReport {
    let value = projector_noncommutativity();
    CheckReport::predicate("scaffold.projector_noncommutativity", PROJECTOR_ANCHOR, value > 0.0)
        .with_note("commutator_max_entry", fmt_sci(value))
}
