use proptest::prelude::*;

use super::*;
use crate::baths::{BathSpec, FormFactor, Statistics};
use crate::error::Error;
use crate::gkls::{build_davies, stationary_state, Coupling, GklsGenerator, Schedule};
use crate::opcore::{cp_check, propagator, unitary_propagator, DensityMatrix, Operator, Superoperator};
use crate::random::{random_density, seeded};
use crate::scalar::{max_abs, CMatrix};

fn ohmic(label: &str, t: f64, strength: f64) -> BathSpec<f64> {
    BathSpec::new(label, t, Statistics::Bose, FormFactor::Ohmic { strength, cutoff: 20.0 }).unwrap()
}

fn band(label: &str, t: f64, low: f64, high: f64) -> BathSpec<f64> {
    BathSpec::new(label, t, Statistics::Bose, FormFactor::Band { strength: 0.05, low, high }).unwrap()
}

fn circular(omega: f64, eps: f64) -> CircularDrive<f64> {
    CircularDrive { omega0: 1.0, amplitude: eps, drive_frequency: omega, phase: 0.0 }
}

/// Frequency-modulated qubit `H = sz/2 (1 + W cos W t)`; the modulation depth
/// tracks `W` so the sideband weights stay fixed.
fn modulated(omega: f64) -> HarmonicDrive<f64> {
    HarmonicDrive { h0: Operator::pauli_z().scale(0.5), v: Operator::pauli_z().scale(0.5 * omega), drive_frequency: omega, phase: 0.0 }
}

/// Hot bath sees only the upper sideband region, cold only the lower one.
fn sideband_machine(omega: f64) -> FloquetCurrents<f64> {
    let dec = floquet_decompose(&modulated(omega), 128).unwrap();
    let couplings = [Coupling::new(Operator::pauli_x(), band("h", 1.0, 1.05, 1.7)), Coupling::new(Operator::pauli_x(), band("c", 0.5, 0.3, 0.95))];
    let fg = build_floquet_generator(&dec, &couplings, (1.5 / omega).ceil() as usize + 6).unwrap();
    let ss = stationary_state(&fg.generator).unwrap();
    floquet_heat_currents(&fg, &ss)
}

fn dissipative_part(g: &GklsGenerator<f64>) -> Superoperator<f64> {
    g.liouvillian() - &g.hamiltonian_part()
}

#[test]
fn constant_hamiltonian_is_its_own_average() {
    let h = Operator::from_real_rows(2, &[0.2, 0.05, 0.05, -0.1]).unwrap();
    let drive = HarmonicDrive { h0: h.clone(), v: Operator::zeros(2), drive_frequency: 2.0, phase: 0.0 };
    let dec = floquet_decompose(&drive, 32).unwrap();
    assert!(max_abs(&(dec.h_av.matrix() - h.matrix())) < 1e-12);
    for up in &dec.periodic {
        assert!(max_abs(&(up - CMatrix::identity(2, 2))) < 1e-12);
    }
}

#[test]
fn circular_drive_matches_rotating_frame() {
    let (w0, w, eps, phi) = (1.0, 0.8, 0.3, 0.4);
    let drive = CircularDrive { omega0: w0, amplitude: eps, drive_frequency: w, phase: phi };
    let dec = floquet_decompose(&drive, 64).unwrap();
    let tau = 2.0 * std::f64::consts::PI / w;
    // U(tau) = R(tau) exp(-i H_rot tau) with R(tau) = exp(-i pi sz) = -I.
    let h_rot = &(&Operator::pauli_z().scale(0.5 * (w0 - w)) + &Operator::pauli_x().scale(0.5 * eps * phi.cos()))
        + &Operator::pauli_y().scale(0.5 * eps * phi.sin());
    let oracle = unitary_propagator(&h_rot, tau).unwrap().matrix() * crate::scalar::cr(-1.0);
    assert!(max_abs(&(dec.monodromy.matrix() - oracle)) < 1e-9);
    let rabi = ((w0 - w) * (w0 - w) + eps * eps).sqrt();
    let e = (w - rabi) / 2.0;
    assert!((dec.quasienergies[0] + e.abs()).abs() < 1e-9);
    assert!((dec.quasienergies[1] - e.abs()).abs() < 1e-9);
    assert!(dec.monodromy_residual().unwrap() < 1e-9);
    assert!(dec.periodicity_residual() < 1e-9);
}

#[test]
fn grid_refinement_is_converged() {
    let d1 = floquet_decompose(&circular(0.9, 0.2), 200).unwrap();
    let d2 = floquet_decompose(&circular(0.9, 0.2), 400).unwrap();
    assert!(max_abs(&(d1.h_av.matrix() - d2.h_av.matrix())) < 1e-8);
}

#[test]
fn periodic_part_off_grid_matches_samples() {
    let drive = circular(1.1, 0.25);
    let dec = floquet_decompose(&drive, 64).unwrap();
    let k = 17;
    let up = dec.periodic_part_at(&drive, dec.times[k] + 3.0 * dec.period).unwrap();
    assert!(max_abs(&(up - &dec.periodic[k])) < 1e-9);
    assert!(matches!(dec.propagator_at(&drive, -1.0), Err(Error::NegativeTime(_))));
}

#[test]
fn circular_drive_has_three_positive_lines() {
    let dec = floquet_decompose(&circular(0.8, 0.3), 64).unwrap();
    let lines = harmonic_decompose(&dec, &Operator::pauli_x(), 5).unwrap();
    let mut pos: Vec<f64> = lines.iter().map(|l| l.omega_av + dec.omega * l.q as f64).filter(|&w| w > 1e-9).collect();
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(pos.len(), 3, "{pos:?}");
    let rabi = (0.2f64 * 0.2 + 0.3 * 0.3).sqrt();
    for (got, want) in pos.iter().zip([0.8 - rabi, 0.8, 0.8 + rabi]) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!(reconstruction_residual(&dec, &Operator::pauli_x(), &lines) < 1e-8);
}

#[test]
fn undriven_lines_are_bohr_frequencies() {
    let drive = HarmonicDrive { h0: Operator::pauli_z().scale(0.5), v: Operator::zeros(2), drive_frequency: 0.7, phase: 0.0 };
    let dec = floquet_decompose(&drive, 32).unwrap();
    let lines = harmonic_decompose(&dec, &Operator::pauli_x(), 5).unwrap();
    assert_eq!(lines.len(), 2);
    for l in &lines {
        assert!(((l.omega_av + dec.omega * l.q as f64).abs() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn zero_amplitude_reproduces_davies() {
    let h0 = Operator::pauli_z().scale(0.5);
    let drive = HarmonicDrive { h0: h0.clone(), v: Operator::zeros(2), drive_frequency: 0.7, phase: 0.0 };
    let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", 3.0, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", 0.4, 0.02))];
    let dec = floquet_decompose(&drive, 32).unwrap();
    let fg = build_floquet_generator(&dec, &couplings, 5).unwrap();
    let dav = build_davies(&h0, &couplings).unwrap();
    assert!(max_abs((&dissipative_part(&fg.generator) - &dissipative_part(&dav)).matrix()) < 1e-8);
    let cur = floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap());
    let jd = dav.heat_currents(stationary_state(&dav).unwrap().matrix());
    assert!(jd[0] > 1e-4);
    for k in 0..2 {
        assert!((cur.heat[k] - jd[k]).abs() < 1e-8, "{} vs {}", cur.heat[k], jd[k]);
    }
    assert!(cur.power.abs() < 1e-12);
}

#[test]
fn undriven_single_bath_has_no_current() {
    let drive = HarmonicDrive { h0: Operator::pauli_z().scale(0.5), v: Operator::zeros(2), drive_frequency: 0.7, phase: 0.0 };
    let dec = floquet_decompose(&drive, 32).unwrap();
    let fg = build_floquet_generator(&dec, &[Coupling::new(Operator::pauli_x(), ohmic("b", 1.0, 0.05))], 5).unwrap();
    let cur = floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap());
    assert!(cur.heat[0].abs() < 1e-12);
}

#[test]
fn heat_routes_agree_and_channels_are_cp() {
    let dec = floquet_decompose(&circular(0.9, 0.3), 64).unwrap();
    let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", 2.0, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", 0.3, 0.05))];
    let fg = build_floquet_generator(&dec, &couplings, 5).unwrap();
    assert!(fg.channels.iter().all(|c| c.rate >= 0.0));
    let ss = stationary_state(&fg.generator).unwrap();
    let cur = floquet_heat_currents(&fg, &ss);
    // P from drive-quanta counting against the heat sum.
    assert!(cur.first_law_residual < 1e-8);
    assert!(cur.second_law_value <= 1e-9);
    for t in [0.1, 1.0, 10.0] {
        let (ok, min) = cp_check(&propagator(fg.generator.liouvillian(), t).unwrap());
        assert!(ok, "min Choi eigenvalue {min}");
    }
}

#[test]
fn sideband_machine_changes_regime_with_detuning() {
    // Engine/refrigerator boundary at W* = (T_h - T_c)/(T_h + T_c) = 1/3.
    let engine = sideband_machine(0.27);
    let dissipator = sideband_machine(0.3);
    let pump = sideband_machine(0.41);
    assert_eq!(engine.regime, Regime::Engine);
    assert_eq!(dissipator.regime, Regime::Dissipator);
    assert_eq!(pump.regime, Regime::Refrigerator);
    assert!(engine.heat[1] < 0.0 && pump.heat[1] > 0.0);
    assert!(engine.heat[0] > 0.0 && pump.heat[0] < 0.0);
    for c in [&engine, &dissipator, &pump] {
        assert!(c.second_law_value <= 1e-9);
        assert!(c.first_law_residual < 1e-8);
    }
}

#[test]
fn limit_cycle_attracts_schroedinger_dynamics() {
    let drive = circular(1.0, 0.3);
    let n = 256;
    let dec = floquet_decompose(&drive, 2 * n).unwrap();
    let fg = build_floquet_generator(&dec, &[Coupling::new(Operator::pauli_x(), ohmic("b", 0.5, 0.1))], 5).unwrap();
    let rho0 = stationary_state(&fg.generator).unwrap();
    let cycle = limit_cycle(&dec, &rho0).unwrap();
    // Independent route: RK4 on the time-dependent master equation with
    // jump operators U_p(t) S(w_q) U_p^dagger(t).
    let rhs = |k: usize, rho: &CMatrix<f64>| -> CMatrix<f64> {
        let t = dec.times[k];
        let h = drive.hamiltonian(t).unwrap();
        let up = &dec.periodic[k];
        let mut out = (h.matrix() * rho - rho * h.matrix()) * crate::scalar::c(0.0, -1.0);
        for ch in &fg.channels {
            let v = up * &ch.op * up.adjoint();
            let vdv = v.adjoint() * &v;
            out += (&v * rho * v.adjoint() - (&vdv * rho + rho * &vdv) * crate::scalar::cr(0.5)) * crate::scalar::cr(ch.rate);
        }
        out
    };
    let mut rng = seeded(7);
    let mut rho = random_density::<f64>(2, &mut rng).into_matrix();
    let h = dec.period / n as f64;
    let hc = crate::scalar::cr(h);
    for _ in 0..50 {
        for s in 0..n {
            let (k0, k1, k2) = (2 * s, 2 * s + 1, 2 * s + 2);
            let a = rhs(k0, &rho);
            let b = rhs(k1, &(&rho + &a * (hc * 0.5)));
            let c = rhs(k1, &(&rho + &b * (hc * 0.5)));
            let d = rhs(k2, &(&rho + &c * hc));
            rho += (a + (b + c) * crate::scalar::cr(2.0) + d) * (hc / 6.0);
        }
    }
    let rho = DensityMatrix::from_dynamics(rho).unwrap();
    assert!(rho.trace_distance(&cycle[0]) < 1e-6, "{}", rho.trace_distance(&cycle[0]));
    assert!(cycle[n].trace_distance(&cycle[0]) > 1e-3);
}

#[test]
fn driven_three_level_system() {
    let h0 = Operator::diagonal(&[0.0, 1.0, 2.3]);
    let v = Operator::from_real_rows(3, &[0.0, 0.1, 0.0, 0.1, 0.0, 0.1, 0.0, 0.1, 0.0]).unwrap();
    let drive = HarmonicDrive { h0, v, drive_frequency: 1.7, phase: 0.3 };
    let dec = floquet_decompose(&drive, 64).unwrap();
    assert!(dec.monodromy_residual().unwrap() < 1e-9);
    let s = Operator::from_real_rows(3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
    let lines = harmonic_decompose(&dec, &s, 8).unwrap();
    assert!(reconstruction_residual(&dec, &s, &lines) < 1e-8);
    let fg = build_floquet_generator(&dec, &[Coupling::new(s.clone(), ohmic("h", 2.0, 0.05)), Coupling::new(s, ohmic("c", 0.5, 0.05))], 8).unwrap();
    let cur = floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap());
    assert!(cur.first_law_residual < 1e-8);
    assert!(cur.second_law_value <= 1e-9);
}

#[test]
fn quasi_energy_on_branch_cut_is_rejected() {
    let drive = HarmonicDrive { h0: Operator::pauli_z().scale(0.5), v: Operator::zeros(2), drive_frequency: 1.0, phase: 0.0 };
    assert!(matches!(floquet_decompose(&drive, 32), Err(Error::BranchAmbiguity { .. })));
}

#[test]
fn insufficient_harmonics_are_rejected() {
    let drive = HarmonicDrive { h0: Operator::pauli_z().scale(0.5), v: Operator::pauli_z().scale(1.5), drive_frequency: 0.45, phase: 0.0 };
    let dec = floquet_decompose(&drive, 64).unwrap();
    match harmonic_decompose(&dec, &Operator::pauli_x(), 1) {
        Err(Error::HarmonicTail { tail, q_max }) => {
            assert_eq!(q_max, 1);
            assert!(tail > 1e-6);
        }
        other => panic!("expected tail error, got {other:?}"),
    }
    assert!(harmonic_decompose(&dec, &Operator::pauli_x(), 40).is_err());
}

#[test]
fn harmonic_on_bath_pole_is_rejected() {
    let dec = floquet_decompose(&modulated(0.1), 128).unwrap();
    let flat = BathSpec::new("f", 0.5, Statistics::Bose, FormFactor::Flat { strength: 0.05, cutoff: 2.0 }).unwrap();
    assert!(matches!(build_floquet_generator(&dec, &[Coupling::new(Operator::pauli_x(), flat)], 20), Err(Error::BosePole { .. })));
}

#[test]
fn limit_cycle_csv_layout() {
    let c = sideband_machine(0.41);
    let csv = limit_cycle_csv(&["h".to_string(), "c".to_string()], &[(0.41, c)]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "param,J_h,J_c,P,second_law_value,regime");
    assert!(lines.next().unwrap().ends_with(",refrigerator"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn second_law_holds_for_random_drives(w in 0.55f64..1.6, eps in 0.0f64..0.4, th in 0.3f64..5.0, tc in 0.1f64..2.0) {
        let dec = floquet_decompose(&circular(w, eps), 64).unwrap();
        let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", th, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", tc, 0.05))];
        let fg = build_floquet_generator(&dec, &couplings, 5).unwrap();
        let cur = floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap());
        prop_assert!(cur.second_law_value <= 1e-9);
        prop_assert!(cur.first_law_residual <= 1e-8);
    }
}
