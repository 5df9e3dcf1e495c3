//! Check batteries, one per module. Failures inside a check become failed
//! reports; only configuration problems abort a run.

use std::f64::consts::PI;
use std::fmt::Display;

use rand::Rng;

use qkin_core::constants::{PhysicalConstants, UnitSystem};
use qkin_core::fock::{
    check_ccr, number_operator, svn_intertwiner_residual, weyl_fock_residual, weyl_inverse_residual, GridRep,
    HbarScale, PhaseVector, TruncatedFock, NUMBER_ANCHOR, SVN_ANCHOR, WEYL_ANCHOR,
};
use qkin_core::hegerfeldt::spreading_report;
use qkin_core::linalg::{c, hermitian_eig, identity, mat_exp, max_abs, CMatrix, CVector, Tolerance, C64};
use qkin_core::modular::{
    cyclic_separating_check, detailed_balance_ratio, gibbs_kms_check, gns_construct, kms_check, kms_residuals,
    unruh_chain, CocyclePair, Continuation, FiniteAlgebra, StandardForm, CYCLIC_ANCHOR, GIBBS_ANCHOR, GNS_ANCHOR,
    KMS_ANCHOR, TOMITA_ANCHOR, UNRUH_ANCHOR,
};
use qkin_core::photon::{
    build_hamiltonian, build_helicity_operator, hamiltonian_spectrum_deviation, joint_quantization_check,
    joint_quantization_residual, single_photon_energy, smeared_field_ccr, vacuum_separating_diagnostic, FieldForm,
    Helicity, ModeSet, Ordering, HAMILTONIAN_ANCHOR, HELICITY_ANCHOR, JOINT_ANCHOR, PLANCK_ANCHOR,
};
use qkin_core::random::{normal_complex, random_complex, random_hermitian, random_unit_vector, seeded, SeededRng};
use qkin_core::report::{fmt_sci, CheckReport};
use qkin_core::scaffold::{
    bandwidth_duration, bandwidth_duration_check, born_probability, classical_energy, classical_helicity,
    evolve_classical, galilei_act, galilei_jacobian, kg_inner, null_cone_residual, poisson_bracket_check,
    projector_noncommutativity_check, symplectic_residual, trine_povm, ClassicalModeState, GalileiElement,
    JonesVector, PhasePoint, SampledEnvelope, BORN_ANCHOR, DISPERSION_ANCHOR, EVOLUTION_ANCHOR, FOURIER_ANCHOR,
    GALILEI_ANCHOR, KG_ANCHOR,
};
use qkin_core::photon::ModeLabel;
use qkin_opexpr::checks::BatteryConfig;

use crate::config::{ModeSetSpec, SuiteConfig};

pub const SUITES: [&str; 6] = ["fock", "photon", "scaffold", "opexpr", "modular", "hegerfeldt"];

/// Turns an error inside a check into a failed report carrying the message.
fn guarded<E: Display>(name: &str, anchor: &str, f: impl FnOnce() -> Result<CheckReport, E>) -> CheckReport {
    f().unwrap_or_else(|e| CheckReport::new(name, anchor, f64::INFINITY, 0.0).with_note("error", e.to_string()))
}

fn renamed(mut r: CheckReport, name: String) -> CheckReport {
    r.name = name;
    r
}

fn hbar_tag(h: f64) -> String {
    format!("hbar{h}")
}

// ---------------------------------------------------------------- fock

/// Seeded phase-space pairs with `|ξ|, |η| ≤ 1`.
pub fn weyl_pairs(seed: u64, count: usize) -> Vec<(PhaseVector, PhaseVector)> {
    let mut rng = seeded(seed);
    let draw = |rng: &mut SeededRng| {
        let r = rng.random::<f64>().sqrt();
        let th = rng.random::<f64>() * 2.0 * PI;
        PhaseVector::new(r * th.cos(), r * th.sin())
    };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

pub fn number_spectrum_deviation(cutoff: usize, hbar: f64) -> Result<f64, qkin_core::Error> {
    let fock = TruncatedFock::new(cutoff, HbarScale::new(hbar)?)?;
    let spec = hermitian_eig(&number_operator(&fock), Tolerance::default())?;
    Ok(spec.values.iter().enumerate().map(|(i, v)| (v - i as f64).abs()).fold(0.0, f64::max))
}

fn weyl_checks(cfg: &SuiteConfig, h: f64) -> Vec<CheckReport> {
    let pairs = weyl_pairs(cfg.seed(), 6);
    let tag = hbar_tag(h);
    let sweep: Result<Vec<(usize, f64)>, qkin_core::Error> = cfg
        .grids
        .weyl_cutoffs
        .iter()
        .map(|&n| Ok((n, weyl_fock_residual(&TruncatedFock::new(n, HbarScale::new(h)?)?, &pairs)?)))
        .collect();
    let sweep = match sweep {
        Ok(s) => s,
        Err(e) => {
            let name = format!("fock.weyl_relation.{tag}");
            return vec![guarded(&name, WEYL_ANCHOR, || Err(e))];
        }
    };
    let table = |r: CheckReport| {
        sweep
            .iter()
            .fold(r.with_columns(["cutoff", "residual"]), |acc, (n, e)| acc.with_row([n.to_string(), fmt_sci(*e)]))
    };
    let (top, finest) = *sweep.last().unwrap();
    let rise = sweep.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0, f64::max);
    let inverse = guarded(&format!("fock.weyl_inverse.{tag}"), WEYL_ANCHOR, || {
        let quad = TruncatedFock::new(top, HbarScale::new(h)?)?.quadratures();
        let worst = pairs.iter().try_fold(0.0f64, |acc, (xi, _)| Ok::<_, qkin_core::Error>(acc.max(weyl_inverse_residual(&quad, *xi)?)))?;
        Ok::<_, qkin_core::Error>(CheckReport::new(format!("fock.weyl_inverse.{tag}"), WEYL_ANCHOR, worst, 1e-10))
    });
    vec![
        table(CheckReport::new(format!("fock.weyl_relation.{tag}"), WEYL_ANCHOR, finest, 1e-6).with_note("cutoff", top)),
        table(CheckReport::new(format!("fock.weyl_monotone.{tag}"), WEYL_ANCHOR, rise, 1e-12)),
        inverse,
    ]
}

/// Intertwiner residuals at `points` and `2·points`; the box is scaled by
/// `√ħ` so the dimensionless grid is the same for every ħ.
pub fn svn_sweep(cfg: &SuiteConfig, h: f64) -> Result<[(usize, f64); 2], qkin_core::Error> {
    let g = &cfg.grids;
    let hbar = HbarScale::new(h)?;
    let fock = TruncatedFock::new(g.svn_states.max(2), hbar)?;
    let length = g.svn_length * h.sqrt();
    let mut out = [(0, 0.0); 2];
    for (slot, points) in out.iter_mut().zip([g.svn_points, 2 * g.svn_points]) {
        let grid = GridRep::new(points, length, hbar)?;
        *slot = (points, svn_intertwiner_residual(&fock, &grid, g.svn_states)?.max_error);
    }
    Ok(out)
}

fn svn_checks(cfg: &SuiteConfig, h: f64) -> Vec<CheckReport> {
    let tag = hbar_tag(h);
    let g = &cfg.grids;
    match svn_sweep(cfg, h) {
        Ok([(p, coarse), (p2, fine)]) => {
            let ratio = if coarse < 1e-12 && fine < 1e-12 { 0.0 } else { fine / coarse };
            let table = |r: CheckReport| {
                r.with_columns(["points", "residual"])
                    .with_row([p.to_string(), fmt_sci(coarse)])
                    .with_row([p2.to_string(), fmt_sci(fine)])
            };
            vec![
                table(CheckReport::new(format!("fock.svn_intertwiner.{tag}"), SVN_ANCHOR, coarse, 1e-6))
                    .with_note("states", g.svn_states)
                    .with_note("length", fmt_sci(g.svn_length * h.sqrt())),
                table(CheckReport::new(format!("fock.svn_refinement.{tag}"), SVN_ANCHOR, ratio, 0.5)),
            ]
        }
        Err(e) => vec![guarded(&format!("fock.svn_intertwiner.{tag}"), SVN_ANCHOR, || Err(e))],
    }
}

pub fn fock_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for h in cfg.hbar_sweep() {
        let tag = hbar_tag(h);
        for &n in &cfg.grids.number_cutoffs {
            let name = format!("fock.number_spectrum.cutoff{n}.{tag}");
            out.push(guarded(&name, NUMBER_ANCHOR, || {
                Ok::<_, qkin_core::Error>(CheckReport::new(&name, NUMBER_ANCHOR, number_spectrum_deviation(n, h)?, 1e-10))
            }));
        }
        for &n in &cfg.grids.ccr_cutoffs {
            let name = format!("fock.ccr.cutoff{n}.{tag}");
            out.push(guarded(&name, qkin_core::fock::CCR_ANCHOR, || {
                let fock = TruncatedFock::new(n, HbarScale::new(h)?)?;
                Ok::<_, qkin_core::Error>(renamed(check_ccr(&fock, Tolerance::default()), name.clone()))
            }));
        }
        out.extend(weyl_checks(cfg, h));
        out.extend(svn_checks(cfg, h));
    }
    out
}

// ---------------------------------------------------------------- photon

pub fn build_mode_set(spec: &ModeSetSpec, hbar: f64, c_speed: f64) -> Result<ModeSet, qkin_core::Error> {
    let modes = spec
        .modes
        .iter()
        .map(|m| Ok((m.k, Helicity::from_sign(m.helicity)?)))
        .collect::<Result<Vec<_>, qkin_core::Error>>()?;
    ModeSet::new(modes, spec.cutoff, HbarScale::new(hbar)?, c_speed)
}

fn photon_constants(cfg: &SuiteConfig) -> PhysicalConstants {
    match cfg.unit_system {
        UnitSystem::Si => PhysicalConstants::si(),
        UnitSystem::Natural => PhysicalConstants { hbar: cfg.hbar(), ..PhysicalConstants::NATURAL },
    }
}

fn random_coefficients(rng: &mut SeededRng, n: usize, real: bool) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let z = normal_complex(rng);
            if real {
                c(z.re, 0.0)
            } else {
                z
            }
        })
        .collect()
}

fn mode_set_checks(ms: &ModeSet, label: &str, energy_unit: f64, seed: u64) -> Vec<CheckReport> {
    let hbar = ms.hbar().value();
    let mut out = Vec::new();
    for (ordering, key, anchor) in [
        (Ordering::Symmetric, "planck_spectrum", HAMILTONIAN_ANCHOR),
        (Ordering::Normal, "planck_spectrum_normal", HAMILTONIAN_ANCHOR),
    ] {
        let name = format!("photon.{key}.{label}");
        out.push(guarded(&name, anchor, || {
            let dev = hamiltonian_spectrum_deviation(ms, ordering)?;
            Ok::<_, qkin_core::Error>(
                CheckReport::new(&name, anchor, dev / energy_unit, 1e-9).with_note("absolute_deviation", fmt_sci(dev)),
            )
        }));
    }

    let h_normal = build_hamiltonian(ms, Ordering::Normal).matrix;
    let lambda = build_helicity_operator(ms);
    let vacuum = ms.vacuum();
    let e0 = vacuum.dotc(&(&h_normal * &vacuum)).re;
    let name = format!("photon.single_quantum_energy.{label}");
    out.push(guarded(&name, PLANCK_ANCHOR, || {
        let mut worst = 0.0f64;
        for (k, mode) in ms.modes().iter().enumerate() {
            let mut occ = vec![0; ms.mode_count()];
            occ[k] = 1;
            let one = ms.basis_state(&occ);
            let gap = one.dotc(&(&h_normal * &one)).re - e0;
            let quantum = single_photon_energy(ms, k)?;
            worst = worst.max((gap - quantum).abs()).max((quantum - hbar * mode.frequency()).abs());
        }
        Ok::<_, qkin_core::Error>(CheckReport::new(&name, PLANCK_ANCHOR, worst / energy_unit, 1e-12))
    }));

    let mut helicity_error = 0.0f64;
    for (k, mode) in ms.modes().iter().enumerate() {
        let mut occ = vec![0; ms.mode_count()];
        occ[k] = 1;
        let one = ms.basis_state(&occ);
        let expected = &one * c(mode.helicity().sign() * hbar, 0.0);
        helicity_error = helicity_error.max((&lambda.matrix * &one - expected).norm() / hbar);
    }
    out.push(CheckReport::new(format!("photon.helicity_single_quantum.{label}"), HELICITY_ANCHOR, helicity_error, 0.0));

    let h_sym = build_hamiltonian(ms, Ordering::Symmetric);
    out.push(CheckReport::new(
        format!("photon.h_lambda_commute.{label}"),
        HELICITY_ANCHOR,
        h_sym.commutator_norm(&lambda) / (energy_unit * hbar),
        1e-12,
    ));

    out.push(renamed(
        joint_quantization_check(ms, Tolerance::new(0.0, 1e-12)),
        format!("photon.joint_quantization.{label}"),
    ));
    // negative control: detune the first mode's energy weight by 5%
    let name = format!("photon.joint_quantization_negative.{label}");
    out.push(guarded(&name, JOINT_ANCHOR, || {
        let quantum = single_photon_energy(ms, 0)?;
        let detuned = &h_normal + ms.number(0)?.matrix * c(0.05 * quantum, 0.0);
        let r = joint_quantization_residual(ms, &detuned, &lambda.matrix)?;
        Ok::<_, qkin_core::Error>(CheckReport::lower_bound(&name, JOINT_ANCHOR, r, 1e-3 * quantum))
    }));

    let name = format!("photon.vacuum_not_separating.{label}");
    out.push(guarded(&name, qkin_core::photon::VACUUM_ANCHOR, || {
        Ok::<_, qkin_core::Error>(renamed(vacuum_separating_diagnostic(ms)?.report(ms), name.clone()))
    }));

    let mut rng = seeded(seed);
    for (form, key, real) in [(FieldForm::PsiPsiDagger, "psi", false), (FieldForm::PhiPi, "phi_pi", true)] {
        let name = format!("photon.smeared_ccr.{key}.{label}");
        let f = random_coefficients(&mut rng, ms.mode_count(), real);
        let g = random_coefficients(&mut rng, ms.mode_count(), real);
        out.push(guarded(&name, qkin_core::photon::SMEARED_ANCHOR, || {
            Ok::<_, qkin_core::Error>(renamed(smeared_field_ccr(ms, &f, &g, form, Tolerance::new(0.0, 1e-12))?, name.clone()))
        }));
    }
    out
}

pub fn photon_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let k = photon_constants(cfg);
    // energy per unit wavenumber: 1 in natural units, ħc·(1 m⁻¹) in SI
    let energy_unit = k.hbar * k.c;
    let mut out = Vec::new();
    for (i, spec) in cfg.mode_sets.iter().enumerate() {
        let label = spec.label();
        match build_mode_set(spec, k.hbar, k.c) {
            Ok(ms) => out.extend(mode_set_checks(&ms, &label, energy_unit, cfg.seed().wrapping_add(i as u64))),
            Err(e) => out.push(guarded(&format!("photon.mode_set.{label}"), qkin_core::report::PLUMBING, || Err(e))),
        }
    }
    out
}

// ---------------------------------------------------------------- scaffold

fn random_galilei(rng: &mut SeededRng) -> Result<GalileiElement, qkin_core::Error> {
    let mut v3 = |s: f64| [0; 3].map(|_| s * (2.0 * rng.random::<f64>() - 1.0));
    let translation = v3(3.0);
    let boost = v3(1.0);
    let q = [0; 4].map(|_| normal_complex(rng).re);
    let rotation = GalileiElement::rotation_from_quaternion(q);
    let shift = 2.0 * rng.random::<f64>() - 1.0;
    GalileiElement::new(translation, boost, rotation, shift)
}

fn gaussian(n: usize, dt: f64, sigma: f64, chirp: f64) -> Result<SampledEnvelope, qkin_core::Error> {
    let t0 = n as f64 * dt / 2.0;
    SampledEnvelope::from_fn(n, dt, |t| {
        let x = t - t0;
        C64::from_polar((-x * x / (4.0 * sigma * sigma)).exp(), chirp * x * x)
    })
}

pub fn envelopes(seed: u64) -> Result<Vec<(String, SampledEnvelope)>, qkin_core::Error> {
    let n = 1024;
    let dt = 0.05;
    let mut out = vec![
        ("gaussian".to_string(), gaussian(n, dt, 2.0, 0.0)?),
        ("chirped_gaussian".to_string(), gaussian(n, dt, 2.0, 0.05)?),
        (
            "square".to_string(),
            SampledEnvelope::from_fn(n, dt, |t| if (t - 25.6).abs() < 3.0 { c(1.0, 0.0) } else { c(0.0, 0.0) })?,
        ),
        (
            "two_tone".to_string(),
            SampledEnvelope::from_fn(n, dt, |t| {
                let x = t - 25.6;
                c((-x * x / 8.0).exp(), 0.0) * (c(0.0, 3.0 * x).exp() + c(0.0, -2.0 * x).exp())
            })?,
        ),
    ];
    let mut rng = seeded(seed);
    for i in 0..8 {
        let samples = (0..128).map(|_| normal_complex(&mut rng)).collect();
        out.push((format!("random{i}"), SampledEnvelope::new(samples, 0.1)?));
    }
    Ok(out)
}

fn scaffold_modes() -> Result<Vec<ModeLabel>, qkin_core::Error> {
    (0..5)
        .map(|k| {
            let sigma = if k % 2 == 0 { Helicity::Plus } else { Helicity::Minus };
            ModeLabel::new([0.3 * (k + 1) as f64, 0.1, -0.2], sigma, 1.0)
        })
        .collect()
}

pub fn scaffold_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let seed = cfg.seed();
    let mut out = Vec::new();

    out.push(guarded("scaffold.dispersion", DISPERSION_ANCHOR, || {
        let worst = scaffold_modes()?
            .iter()
            .map(|m| {
                let k = m.wavevector();
                null_cone_residual(k, 1.0).abs() / k.iter().map(|x| x * x).sum::<f64>()
            })
            .fold(0.0, f64::max);
        Ok::<_, qkin_core::Error>(CheckReport::new("scaffold.dispersion", DISPERSION_ANCHOR, worst, 4.0 * f64::EPSILON))
    }));

    out.push(guarded("scaffold.kg_conservation", KG_ANCHOR, || {
        let modes = scaffold_modes()?;
        let mut rng = seeded(seed);
        let u = ClassicalModeState::new((0..modes.len()).map(|_| normal_complex(&mut rng)).collect())?;
        let n0 = kg_inner(&u, &u)?;
        let e0 = classical_energy(&u, &modes)?;
        let s0 = classical_helicity(&u, &modes)?;
        let (mut dn, mut de, mut ds) = (0.0f64, 0.0f64, 0.0f64);
        for t in [0.0, 1.0, 10.0, 37.5, 100.0] {
            let ut = evolve_classical(&u, &modes, t)?;
            dn = dn.max((kg_inner(&ut, &ut)? - n0).norm() / n0.re);
            de = de.max((classical_energy(&ut, &modes)? - e0).abs() / e0.abs());
            ds = ds.max((classical_helicity(&ut, &modes)? - s0).abs() / n0.re);
        }
        Ok::<_, qkin_core::Error>(
            CheckReport::new("scaffold.kg_conservation", KG_ANCHOR, dn, 1e-12)
                .with_note("energy_drift", fmt_sci(de))
                .with_note("helicity_drift", fmt_sci(ds)),
        )
    }));
    out.push(guarded("scaffold.energy_helicity_conservation", EVOLUTION_ANCHOR, || {
        let modes = scaffold_modes()?;
        let mut rng = seeded(seed.wrapping_add(1));
        let u = ClassicalModeState::new((0..modes.len()).map(|_| normal_complex(&mut rng)).collect())?;
        let e0 = classical_energy(&u, &modes)?;
        let s0 = classical_helicity(&u, &modes)?;
        let mut worst = 0.0f64;
        for t in [0.5, 5.0, 50.0] {
            let ut = evolve_classical(&u, &modes, t)?;
            worst = worst
                .max((classical_energy(&ut, &modes)? - e0).abs() / e0.abs())
                .max((classical_helicity(&ut, &modes)? - s0).abs() / e0.abs());
        }
        Ok::<_, qkin_core::Error>(CheckReport::new("scaffold.energy_helicity_conservation", EVOLUTION_ANCHOR, worst, 1e-12))
    }));

    out.push(poisson_bracket_check(3, Tolerance::default()));

    out.push(guarded("scaffold.galilei_symplectic", GALILEI_ANCHOR, || {
        let mut rng = seeded(seed.wrapping_add(2));
        let mut worst = 0.0f64;
        let mut composition = 0.0f64;
        for _ in 0..100 {
            let g = random_galilei(&mut rng)?;
            let h = random_galilei(&mut rng)?;
            let mut v = || [0; 3].map(|_| 2.0 * rng.random::<f64>() - 1.0);
            let x = PhasePoint::new(v(), v(), 0.5 + rng.random::<f64>())?;
            let t = rng.random::<f64>();
            worst = worst.max(symplectic_residual(&galilei_jacobian(&x, &g, t)));
            let direct = galilei_act(&galilei_act(&x, &h, t), &g, t);
            let composed = galilei_act(&x, &g.compose(&h), t);
            for i in 0..3 {
                composition = composition
                    .max((direct.q[i] - composed.q[i]).abs())
                    .max((direct.p[i] - composed.p[i]).abs());
            }
        }
        Ok::<_, qkin_core::Error>(
            CheckReport::new("scaffold.galilei_symplectic", GALILEI_ANCHOR, worst, 1e-12)
                .with_note("composition_error", fmt_sci(composition)),
        )
    }));

    match envelopes(seed) {
        Ok(envs) => {
            for (name, env) in &envs {
                out.push(guarded(&format!("scaffold.bandwidth_duration.{name}"), FOURIER_ANCHOR, || {
                    bandwidth_duration_check(name, env)
                }));
            }
            out.push(guarded("scaffold.gaussian_saturation", FOURIER_ANCHOR, || {
                let bd = bandwidth_duration(&envs[0].1)?;
                Ok::<_, qkin_core::Error>(
                    CheckReport::new("scaffold.gaussian_saturation", FOURIER_ANCHOR, (bd.product - 0.5).abs(), 1e-3)
                        .with_note("product", fmt_sci(bd.product)),
                )
            }));
        }
        Err(e) => out.push(guarded("scaffold.bandwidth_duration", FOURIER_ANCHOR, || Err(e))),
    }

    out.push(guarded("scaffold.born_normalization", BORN_ANCHOR, || {
        let mut rng = seeded(seed.wrapping_add(3));
        let bases = [
            (JonesVector::horizontal(), JonesVector::vertical()),
            (JonesVector::right(), JonesVector::left()),
            (JonesVector::diagonal(), JonesVector::new(c(1.0, 0.0), c(-1.0, 0.0)).normalized()?),
        ];
        let mut povms: Vec<Vec<CMatrix>> = bases
            .iter()
            .map(|(a, b)| Ok(vec![a.projector()?, b.projector()?]))
            .collect::<Result<_, qkin_core::Error>>()?;
        povms.push(trine_povm());
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let psi = JonesVector::new(normal_complex(&mut rng), normal_complex(&mut rng));
            for povm in &povms {
                let p = born_probability(&psi, povm)?;
                worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
            }
        }
        Ok::<_, qkin_core::Error>(CheckReport::new("scaffold.born_normalization", BORN_ANCHOR, worst, 1e-12))
    }));

    out.push(projector_noncommutativity_check());
    out
}

// ---------------------------------------------------------------- opexpr

pub fn opexpr_battery(cfg: &SuiteConfig) -> BatteryConfig {
    BatteryConfig {
        seed: cfg.seed(),
        count: cfg.grids.opexpr_expressions,
        cutoff: cfg.grids.opexpr_cutoff,
        hbar: cfg.hbar(),
        ..BatteryConfig::default()
    }
}

pub fn opexpr_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    match qkin_opexpr::checks::checks(&opexpr_battery(cfg)) {
        Ok(r) => r,
        Err(e) => vec![guarded("opexpr.battery", qkin_opexpr::checks::NORMAL_ORDER_ANCHOR, || Err(e))],
    }
}

// ---------------------------------------------------------------- modular

/// Density with the given spectrum in a seeded random eigenbasis.
pub fn density_with_spectrum(spectrum: &[f64], seed: u64) -> Result<CMatrix, qkin_core::Error> {
    let n = spectrum.len();
    let u = mat_exp(&random_hermitian(n, &mut seeded(seed)), c(0.0, 1.0))?;
    let d = CMatrix::from_fn(n, n, |i, j| if i == j { c(spectrum[i], 0.0) } else { c(0.0, 0.0) });
    Ok(&u * d * u.adjoint())
}

/// Rank by Gaussian elimination with partial pivoting; an oracle independent
/// of the SVD-based rank used by the library.
pub fn elimination_rank(m: &CMatrix, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = max_abs(&a).max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
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

/// Cases for the cyclic/separating oracle comparison, covering every space
/// dimension from 1 to 16.
fn oracle_cases(seed: u64) -> Result<Vec<(String, FiniteAlgebra, CVector)>, qkin_core::Error> {
    let mut rng = seeded(seed);
    let mut cases = Vec::new();
    for n in 1..=16usize {
        let fock = TruncatedFock::new(n.max(2), HbarScale::new(1.0)?)?;
        let pattern: Vec<f64> = (0..n).map(|k| (k % 3) as f64).collect();
        let diag = CMatrix::from_fn(n, n, |i, j| if i == j { c(pattern[i], 0.0) } else { c(0.0, 0.0) });
        let mut algebras = vec![(format!("diag{n}"), FiniteAlgebra::generate(vec![diag])?)];
        if n >= 2 {
            algebras.push((format!("ladder{n}"), FiniteAlgebra::generate(vec![fock.annihilator()])?));
        }
        if n <= 4 {
            algebras.push((format!("generic{n}"), FiniteAlgebra::generate(vec![random_complex(n, &mut rng)])?));
        }
        for (name, alg) in algebras {
            let mut e0 = CVector::zeros(n);
            e0[0] = c(1.0, 0.0);
            cases.push((format!("{name}.basis"), alg.clone(), e0));
            cases.push((format!("{name}.random"), alg, random_unit_vector(n, &mut rng)));
        }
    }
    for d in 2..=4usize {
        let rho = density_with_spectrum(&(1..=d).map(|k| k as f64 / (d * (d + 1) / 2) as f64).collect::<Vec<_>>(), seed + d as u64)?;
        let sf = StandardForm::new(&rho)?;
        let mut product = CVector::zeros(d * d);
        product[0] = c(1.0, 0.0);
        cases.push((format!("standard{d}.omega"), sf.algebra.clone(), sf.omega.clone()));
        cases.push((format!("standard{d}.product"), sf.algebra.clone(), product));
    }
    Ok(cases)
}

pub fn cyclic_separating_oracle_check(seed: u64) -> CheckReport {
    let name = "modular.cyclic_separating_oracle";
    guarded(name, CYCLIC_ANCHOR, || {
        let cases = oracle_cases(seed)?;
        let mut mismatches = Vec::new();
        let mut max_dim = 0;
        for (label, alg, v) in &cases {
            let cs = cyclic_separating_check(alg, v)?;
            let basis = alg.closure();
            let mut e = CMatrix::zeros(alg.dim(), basis.len());
            for (k, a) in basis.iter().enumerate() {
                e.set_column(k, &(a * v));
            }
            let rank = elimination_rank(&e, 1e-9);
            max_dim = max_dim.max(alg.dim());
            if cs.cyclic != (rank == alg.dim()) || cs.separating != (rank == basis.len()) {
                mismatches.push(label.clone());
            }
        }
        let mut r = CheckReport::new(name, CYCLIC_ANCHOR, mismatches.len() as f64, 0.0)
            .with_note("cases", cases.len())
            .with_note("max_dimension", max_dim);
        for m in mismatches {
            r = r.with_note("mismatch", m);
        }
        Ok::<_, qkin_core::Error>(r)
    })
}

/// Sorted `λ_i/λ_j` over all pairs.
pub fn ratio_oracle(rho: &CMatrix) -> Result<Vec<f64>, qkin_core::Error> {
    let lambda = hermitian_eig(rho, Tolerance::default())?.values;
    let mut ratios: Vec<f64> = lambda.iter().flat_map(|a| lambda.iter().map(move |b| a / b)).collect();
    ratios.sort_by(f64::total_cmp);
    Ok(ratios)
}

fn standard_form_checks(label: &str, rho: &CMatrix, seed: u64) -> Vec<CheckReport> {
    let sf = match StandardForm::new(rho) {
        Ok(sf) => sf,
        Err(e) => return vec![guarded(&format!("modular.tomita.{label}"), TOMITA_ANCHOR, || Err(e))],
    };
    let triple = match sf.triple() {
        Ok(t) => t,
        Err(e) => return vec![guarded(&format!("modular.tomita.{label}"), TOMITA_ANCHOR, || Err(e))],
    };
    let mut out = Vec::new();
    let name = format!("modular.tomita.{label}");
    out.push(guarded(&name, TOMITA_ANCHOR, || triple.check(&name, 1e-8)));
    let name = format!("modular.flow_preservation.{label}");
    out.push(guarded(&name, TOMITA_ANCHOR, || {
        Ok::<_, qkin_core::Error>(CheckReport::new(&name, TOMITA_ANCHOR, triple.flow_preservation_residual(&[0.1, 0.7, 2.0])?, 1e-8))
    }));
    let name = format!("modular.double_commutant.{label}");
    out.push(guarded(&name, TOMITA_ANCHOR, || {
        Ok::<_, qkin_core::Error>(CheckReport::new(&name, TOMITA_ANCHOR, sf.algebra.double_commutant_residual()?, 1e-8))
    }));
    let name = format!("modular.delta_spectrum.{label}");
    out.push(guarded(&name, TOMITA_ANCHOR, || {
        let expected = ratio_oracle(rho)?;
        let got = &triple.delta_spectrum().values;
        let dev = got.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dev = if got.len() == expected.len() { dev } else { f64::INFINITY };
        Ok::<_, qkin_core::Error>(CheckReport::new(&name, TOMITA_ANCHOR, dev, 1e-10))
    }));

    let d = sf.factor_dim();
    let mut rng = seeded(seed);
    let a = sf.lift(&random_complex(d, &mut rng));
    let b = sf.lift(&random_complex(d, &mut rng));
    let name = format!("modular.kms.{label}");
    out.push(guarded(&name, KMS_ANCHOR, || {
        Ok::<_, qkin_core::Error>(renamed(kms_check(&triple, &a, &b, 0.7, Tolerance::new(1e-9, 0.0))?, name.clone()))
    }));
    let name = format!("modular.kms_negative_control.{label}");
    out.push(guarded(&name, KMS_ANCHOR, || {
        let r = kms_residuals(&triple, &a, &b, 0.7, Continuation::Corrupted)?;
        Ok::<_, qkin_core::Error>(CheckReport::lower_bound(&name, KMS_ANCHOR, r.max(), 1e-3))
    }));

    let name = format!("modular.gns.{label}");
    out.push(guarded(&name, GNS_ANCHOR, || {
        let gns = gns_construct(rho)?;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = random_complex(d, &mut rng);
            let y = random_complex(d, &mut rng);
            worst = worst.max((gns.state_value(&x) - gns.expectation(&x)).norm());
            worst = worst.max(max_abs(&(gns.represent(&(&x * &y)) - gns.represent(&x) * gns.represent(&y))));
        }
        Ok::<_, qkin_core::Error>(CheckReport::new(&name, GNS_ANCHOR, worst, 1e-10))
    }));
    out
}

pub fn modular_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let seed = cfg.seed();
    let mut out = Vec::new();
    let qubit = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(0.75, 0.0),
        (1, 1) => c(0.25, 0.0),
        _ => c(0.0, 0.0),
    });
    let states: Vec<(&str, Result<CMatrix, qkin_core::Error>)> = vec![
        ("qubit", Ok(qubit.clone())),
        ("qubit_rotated", density_with_spectrum(&[0.6, 0.4], seed)),
        ("qutrit", density_with_spectrum(&[0.5, 0.3, 0.2], seed.wrapping_add(1))),
    ];
    let mut densities = Vec::new();
    for (i, (label, rho)) in states.into_iter().enumerate() {
        match rho {
            Ok(rho) => {
                out.extend(standard_form_checks(label, &rho, seed.wrapping_add(10 + i as u64)));
                densities.push((label, rho));
            }
            Err(e) => out.push(guarded(&format!("modular.tomita.{label}"), TOMITA_ANCHOR, || Err(e))),
        }
    }

    for (label, rho1, rho2) in [
        ("qubit", densities[0].1.clone(), density_with_spectrum(&[0.5, 0.5], seed)),
        ("qubit_pair", densities[0].1.clone(), Ok(densities[1].1.clone())),
        ("qutrit", densities[2].1.clone(), density_with_spectrum(&[0.2, 0.45, 0.35], seed.wrapping_add(5))),
    ] {
        let name = format!("modular.cocycle.{label}");
        let pair = rho2.and_then(|r2| CocyclePair::new(&rho1, &r2));
        out.push(guarded(&name, qkin_core::modular::COCYCLE_ANCHOR, || {
            pair.as_ref().map_err(Clone::clone).and_then(|p| p.check(0.3, 0.5, 1e-8)).map(|r| renamed(r, name.clone()))
        }));
        let name = format!("modular.cocycle_identity.{label}");
        out.push(guarded(&name, qkin_core::modular::COCYCLE_ANCHOR, || {
            let p = pair.as_ref().map_err(Clone::clone)?;
            let u0 = p.cocycle(0.0)?;
            Ok::<_, qkin_core::Error>(CheckReport::predicate(&name, qkin_core::modular::COCYCLE_ANCHOR, u0 == identity(u0.nrows())))
        }));
    }

    out.push(guarded("modular.gibbs_kms.oscillator", GIBBS_ANCHOR, || {
        let hbar = cfg.hbar();
        let fock = TruncatedFock::new(8, HbarScale::new(1.0)?)?;
        let h = number_operator(&fock) * c(hbar, 0.0);
        let a = fock.annihilator();
        Ok::<_, qkin_core::Error>(renamed(
            gibbs_kms_check(&h, 2.0 / hbar, hbar, &a, &a.adjoint(), 0.4, Tolerance::new(1e-9, 0.0))?,
            "modular.gibbs_kms.oscillator".into(),
        ))
    }));
    out.push(guarded("modular.detailed_balance.qubit", GIBBS_ANCHOR, || {
        let (e, beta) = (1.3, 0.8);
        let h = CMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { c(e, 0.0) } else { c(0.0, 0.0) });
        let mut lower = CMatrix::zeros(2, 2);
        lower[(0, 1)] = c(1.0, 0.0);
        let ratio = detailed_balance_ratio(&h, beta, 1.0, &lower, &lower.adjoint(), 0.37)?;
        let err = (ratio - c((-beta * e).exp(), 0.0)).norm();
        Ok::<_, qkin_core::Error>(CheckReport::new("modular.detailed_balance.qubit", GIBBS_ANCHOR, err, 1e-10))
    }));

    out.push(cyclic_separating_oracle_check(seed));
    out.extend(unruh_checks());
    out
}

pub fn unruh_checks() -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(guarded("modular.unruh.natural", UNRUH_ANCHOR, || {
        let p = unruh_chain(2.0 * PI, PhysicalConstants::NATURAL, 1.0)?;
        Ok::<_, qkin_core::Error>(
            CheckReport::new("modular.unruh.natural", UNRUH_ANCHOR, (p.temperature - 1.0).abs(), 1e-12)
                .with_note("beta_tau", fmt_sci(p.beta_tau)),
        )
    }));
    out.push(guarded("modular.unruh.si", UNRUH_ANCHOR, || {
        let k = PhysicalConstants::si();
        let p = unruh_chain(9.81, k, 0.0)?;
        let closed_form = k.hbar * 9.81 / (2.0 * PI * k.c * k.k_b);
        Ok::<_, qkin_core::Error>(
            CheckReport::new("modular.unruh.si", UNRUH_ANCHOR, (p.temperature / closed_form - 1.0).abs(), 1e-6)
                .with_note("temperature_K", fmt_sci(p.temperature)),
        )
    }));
    out.push(guarded("modular.unruh.consistency", UNRUH_ANCHOR, || {
        let mut worst = 0.0f64;
        for (a, k) in [(2.0 * PI, PhysicalConstants::NATURAL), (9.81, PhysicalConstants::si()), (1e20, PhysicalConstants::si())] {
            worst = worst.max(unruh_chain(a, k, 1.0)?.consistency_residual());
        }
        Ok::<_, qkin_core::Error>(CheckReport::new("modular.unruh.consistency", UNRUH_ANCHOR, worst, 1e-12))
    }));
    out
}

// ---------------------------------------------------------------- hegerfeldt

pub fn hegerfeldt_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    match spreading_report(&cfg.grids.hegerfeldt) {
        Ok(r) => r.checks(),
        Err(e) => vec![guarded("hegerfeldt.spreading", qkin_core::hegerfeldt::SPREADING_ANCHOR, || Err(e))],
    }
}

pub fn suite_checks(name: &str, cfg: &SuiteConfig) -> Option<Vec<CheckReport>> {
    Some(match name {
        "fock" => fock_checks(cfg),
        "photon" => photon_checks(cfg),
        "scaffold" => scaffold_checks(cfg),
        "opexpr" => opexpr_checks(cfg),
        "modular" => modular_checks(cfg),
        "hegerfeldt" => hegerfeldt_checks(cfg),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elimination_rank_known_cases() {
        assert_eq!(elimination_rank(&identity(4), 1e-12), 4);
        assert_eq!(elimination_rank(&CMatrix::zeros(3, 5), 1e-12), 0);
        let v = CMatrix::from_fn(3, 1, |i, _| c(i as f64 + 1.0, -1.0));
        let rank_one = &v * v.adjoint();
        assert_eq!(elimination_rank(&rank_one, 1e-12), 1);
        let mut rng = seeded(3);
        let a = random_complex(5, &mut rng).columns(0, 3).into_owned();
        let b = random_complex(5, &mut rng).rows(0, 3).into_owned();
        assert_eq!(elimination_rank(&(a * b), 1e-10), 3);
    }

    #[test]
    fn ratio_oracle_of_diagonal_state() {
        let rho = CMatrix::from_fn(2, 2, |i, j| if i == j { c([0.75, 0.25][i], 0.0) } else { c(0.0, 0.0) });
        let r = ratio_oracle(&rho).unwrap();
        let expected = [1.0 / 3.0, 1.0, 1.0, 3.0];
        assert!(r.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-14), "{r:?}");
    }

    #[test]
    fn density_with_spectrum_keeps_eigenvalues() {
        let rho = density_with_spectrum(&[0.5, 0.3, 0.2], 9).unwrap();
        let v = hermitian_eig(&rho, Tolerance::default()).unwrap().values;
        assert!(v.iter().zip([0.2, 0.3, 0.5]).all(|(a, b)| (a - b).abs() < 1e-13), "{v:?}");
    }

    #[test]
    fn weyl_pairs_in_unit_disc_and_seeded() {
        let p = weyl_pairs(4, 50);
        assert!(p.iter().all(|(x, y)| x.norm() <= 1.0 && y.norm() <= 1.0));
        assert_eq!(p, weyl_pairs(4, 50));
        assert_ne!(p, weyl_pairs(5, 50));
    }

    #[test]
    fn guarded_turns_errors_into_failures() {
        let r = guarded("x.y", "anchor", || Err::<CheckReport, _>("boom"));
        assert!(!r.passed);
        assert!(r.measured_error.is_infinite());
        assert_eq!(r.details, vec![vec!["error".to_string(), "boom".to_string()]]);
    }

    #[test]
    fn fast_suites_pass_with_defaults() {
        let cfg = SuiteConfig::default();
        for name in ["scaffold", "hegerfeldt", "photon"] {
            let checks = suite_checks(name, &cfg).unwrap();
            assert!(!checks.is_empty());
            for r in checks {
                assert!(r.passed, "{} err {} tol {}", r.name, r.measured_error, r.tolerance);
                assert!(r.name.starts_with(name));
            }
        }
        assert!(suite_checks("nope", &cfg).is_none());
    }

    #[test]
    fn photon_in_si_units() {
        let cfg = SuiteConfig { unit_system: UnitSystem::Si, ..SuiteConfig::default() };
        for r in photon_checks(&cfg) {
            assert!(r.passed, "{} err {} tol {}", r.name, r.measured_error, r.tolerance);
        }
    }
}
