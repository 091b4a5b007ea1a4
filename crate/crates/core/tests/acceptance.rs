//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use rayon::prelude::*;

use qthermo_core::baths::{BathSpec, FormFactor, Statistics};
use qthermo_core::floquet::{build_floquet_generator, floquet_decompose, floquet_heat_currents, CircularDrive, HarmonicDrive};
use qthermo_core::gkls::{
    adiabatic_propagate, build_davies, propagate, stationary_state, trajectory, AdiabaticOptions, Coupling, GklsGenerator, LinearRamp,
};
use qthermo_core::machines::*;
use qthermo_core::opcore::{eig_hermitian, embed, propagator, DensityMatrix, Operator, Superoperator};
use qthermo_core::random::{random_density, random_hermitian, seeded, uniform};
use qthermo_core::states::{
    complete_passivity, diagonal_vs_microcanonical, ergotropy, gibbs_state, heisenberg_chain, kms_check, neel_state, relative_entropy,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bose(label: &str, t: f64, form: FormFactor<f64>) -> BathSpec<f64> {
    BathSpec::new(label, t, Statistics::Bose, form).unwrap()
}

fn flat(label: &str, t: f64, g: f64) -> BathSpec<f64> {
    bose(label, t, FormFactor::Flat { strength: g, cutoff: 50.0 })
}

fn ohmic(label: &str, t: f64, g: f64) -> BathSpec<f64> {
    bose(label, t, FormFactor::Ohmic { strength: g, cutoff: 20.0 })
}

fn qubit(w: f64) -> Operator<f64> {
    Operator::pauli_z().scale(0.5 * w)
}

fn oscillator(levels: usize) -> (Operator<f64>, Operator<f64>) {
    let a = Operator::annihilation(levels);
    (Operator::number(levels), &a + &a.adjoint())
}

fn otto(transverse: f64, iso: f64, adiabat: f64, protocol: Protocol) -> CycleSpec<f64> {
    let d = OttoDurations { hot: iso, expansion: adiabat, cold: iso, compression: adiabat };
    CycleSpec::otto(WorkingMedium::Qubit { transverse }, 2.0, 1.0, ohmic("h", 2.0, 0.1), ohmic("c", 0.5, 0.1), d, protocol)
}

fn tricycle(wc: f64, tc: f64) -> TricycleSpec<f64> {
    TricycleSpec::new(1.0, wc, flat("h", 1.0, 0.05), flat("c", tc, 0.05), flat("w", f64::INFINITY, 0.05))
}

/// Davies generators used across several criteria.
fn davies_zoo() -> Vec<(String, GklsGenerator<f64>)> {
    let mut out = Vec::new();
    out.push(("qubit".into(), build_davies(&qubit(1.0), &[Coupling::new(Operator::pauli_x(), flat("b", 1.0, 0.1))]).unwrap()));
    let fermi = BathSpec::new("f", 0.7, Statistics::Fermi, FormFactor::Flat { strength: 0.1, cutoff: 50.0 }).unwrap();
    out.push(("fermionic qubit".into(), build_davies(&qubit(1.3), &[Coupling::new(Operator::pauli_x(), fermi)]).unwrap()));
    let (h, x) = oscillator(10);
    out.push(("oscillator".into(), build_davies(&h, &[Coupling::new(x, flat("b", 1.0, 0.1))]).unwrap()));
    let mut rng = seeded(11);
    for k in 0..4 {
        let h = random_hermitian::<f64>(4, &mut rng);
        let s1 = random_hermitian::<f64>(4, &mut rng);
        let s2 = random_hermitian::<f64>(4, &mut rng);
        let gen = build_davies(&h, &[Coupling::new(s1, ohmic("h", 2.5, 0.05)), Coupling::new(s2, ohmic("c", 0.4, 0.05))]).unwrap();
        out.push((format!("random two-bath #{k}"), gen));
    }
    out
}

fn c1_cp_trace() -> Outcome {
    let mut maps: Vec<(String, Superoperator<f64>)> = Vec::new();
    for (name, g) in davies_zoo() {
        for t in [0.1, 1.0, 10.0, 100.0] {
            maps.push((format!("davies {name} t={t}"), propagator(g.liouvillian(), t).unwrap()));
        }
    }
    let dec = floquet_decompose(&CircularDrive { omega0: 1.0, amplitude: 0.3, drive_frequency: 0.9, phase: 0.0 }, 64).unwrap();
    let fg = build_floquet_generator(&dec, &[Coupling::new(Operator::pauli_x(), ohmic("h", 2.0, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", 0.3, 0.05))], 5)
        .unwrap();
    for t in [0.1, 1.0, 10.0, 100.0] {
        maps.push((format!("floquet t={t}"), propagator(fg.generator.liouvillian(), t).unwrap()));
    }
    let mut specs = Vec::new();
    for p in [Protocol::Adiabatic, Protocol::LinearRamp, Protocol::Sudden] {
        specs.push((format!("otto {p:?}"), otto(0.5, 3.0, 1.0, p)));
        specs.push((format!("otto {p:?} dephased"), otto(0.5, 3.0, 1.0, p).with_dephasing_after_adiabats(0.5)));
    }
    specs.push((
        "oscillator otto".into(),
        CycleSpec::otto(WorkingMedium::Oscillator { levels: 8 }, 2.0, 1.0, ohmic("h", 1.0, 0.1), ohmic("c", 0.3, 0.1), OttoDurations::uniform(2.0), Protocol::LinearRamp),
    ));
    let mut cycles: Vec<(String, Cycle<f64>)> = specs.iter().map(|(n, s)| (n.clone(), compose_cycle(s).unwrap())).collect();
    cycles.push(("swap engine".into(), swap_engine(2.0, 1.0, ohmic("h", 2.0, 0.1), ohmic("c", 0.5, 0.1), 5.0).unwrap()));
    for (name, c) in cycles {
        for s in &c.strokes {
            maps.push((format!("{name} stroke {}", s.label), s.map.clone()));
        }
        maps.push((format!("{name} cycle"), c.map.clone()));
    }
    let tri = build_tricycle(&tricycle(0.4, 0.5)).unwrap();
    for t in [1.0, 100.0] {
        maps.push((format!("tricycle t={t}"), propagator(tri.liouvillian(), t).unwrap()));
    }
    let mut worst_choi = f64::INFINITY;
    let mut worst_trace: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, m) in &maps {
        let (c, t) = (m.choi_min_eigenvalue(), m.trace_defect());
        worst_choi = worst_choi.min(c);
        worst_trace = worst_trace.max(t);
        if c < -1e-9 || t > 1e-9 {
            bad.push(name.clone());
        }
    }
    check(bad.is_empty(), format!("{} maps, min Choi eig {worst_choi:.2e}, max trace drift {worst_trace:.2e} {bad:?}", maps.len()))
}

fn c2_zeroth_law() -> Outcome {
    let gamma = 0.1;
    let cases = [("qubit", qubit(1.0), Operator::pauli_x()), ("oscillator", oscillator(10).0, oscillator(10).1)];
    let mut worst: f64 = 0.0;
    for (i, (_, h, x)) in cases.iter().enumerate() {
        let gen = build_davies(h, &[Coupling::new(x.clone(), flat("b", 1.0, gamma))]).unwrap();
        let g = gibbs_state(h, 1.0).unwrap();
        let mut rng = seeded(100 + i as u64);
        for _ in 0..20 {
            let rho0 = random_density::<f64>(h.dim(), &mut rng);
            let rho = propagate(&gen, &rho0, 50.0 / gamma).unwrap();
            worst = worst.max(rho.trace_distance(&g));
        }
    }
    check(worst <= 1e-7, format!("max trace distance to Gibbs at t = 50/gamma: {worst:.2e}"))
}

fn c3_kms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (_, g) in davies_zoo() {
        let baths = g.baths();
        for a in g.channels().iter().filter(|c| c.frequency > 1e-9) {
            let beta = baths[a.bath].beta.expect("thermal bath");
            let partner = g
                .channels()
                .iter()
                .find(|b| b.bath == a.bath && b.coupling == a.coupling && (b.frequency + a.frequency).abs() < 1e-12)
                .expect("absorption partner");
            let expected = (-beta * a.frequency).exp();
            worst = worst.max((partner.rate / a.rate - expected).abs() / expected);
            pairs += 1;
        }
    }
    let mut rng = seeded(33);
    let mut kms: f64 = 0.0;
    for k in 0..20 {
        let d = 2 + k % 4;
        let h = random_hermitian::<f64>(d, &mut rng);
        let a = random_hermitian::<f64>(d, &mut rng);
        let b = random_hermitian::<f64>(d, &mut rng);
        let beta = uniform::<f64>(0.1, 5.0, &mut rng);
        kms = kms.max(kms_check(&h, beta, &a, &b).unwrap());
    }
    check(worst <= 1e-10 && kms <= 1e-9, format!("{pairs} channel pairs, max ratio error {worst:.2e}; kms_check max {kms:.2e}"))
}

fn random_trajectories() -> Vec<(GklsGenerator<f64>, Vec<f64>, DensityMatrix<f64>)> {
    let mut rng = seeded(44);
    (0..10)
        .map(|_| {
            let h = random_hermitian::<f64>(3, &mut rng);
            let s = random_hermitian::<f64>(3, &mut rng);
            let t = uniform::<f64>(0.3, 3.0, &mut rng);
            let gen = build_davies(&h, &[Coupling::new(s, ohmic("b", t, 0.1))]).unwrap();
            let grid: Vec<f64> = (0..100).map(|k| k as f64 * 0.5).collect();
            (gen, grid, random_density::<f64>(3, &mut rng))
        })
        .collect()
}

fn c4_h_theorem() -> Outcome {
    let mut worst: f64 = 0.0;
    for (gen, grid, rho0) in random_trajectories() {
        let st = stationary_state(&gen).unwrap();
        let led = trajectory(&gen, &rho0, &grid).unwrap();
        let s: Vec<f64> = led.states.iter().map(|r| relative_entropy(r, &st).unwrap()).collect();
        for w in s.windows(2) {
            worst = worst.max(w[1] - w[0]);
        }
    }
    check(worst <= 1e-9, format!("10 trajectories x 100 points, largest increase {worst:.2e}"))
}

fn tricycle_grid() -> Vec<TricycleSteady<f64>> {
    let pts: Vec<(f64, f64)> = (0..20).flat_map(|i| (0..20).map(move |j| (0.04 + 0.047 * i as f64, 0.05 + 0.05 * j as f64))).collect();
    pts.par_iter().map(|&(wc, tc)| tricycle_steady(&tricycle(wc, tc)).unwrap()).collect()
}

fn otto_configurations() -> Vec<CycleSpec<f64>> {
    let mut out = Vec::new();
    for p in [Protocol::Adiabatic, Protocol::LinearRamp, Protocol::Sudden] {
        for transverse in [0.0, 0.5, 1.0] {
            for iso in [0.5, 3.0, 30.0] {
                for (th, tc) in [(2.0, 0.5), (4.0, 1.0), (1.0, 0.9)] {
                    let d = OttoDurations { hot: iso, expansion: 1.0, cold: iso, compression: 1.0 };
                    out.push(CycleSpec::otto(WorkingMedium::Qubit { transverse }, 2.0, 1.0, ohmic("h", th, 0.1), ohmic("c", tc, 0.1), d, p));
                }
            }
        }
    }
    out
}

fn c5_second_law() -> Outcome {
    let mut sigma = f64::INFINITY;
    for (gen, grid, rho0) in random_trajectories() {
        sigma = sigma.min(trajectory(&gen, &rho0, &grid).unwrap().min_entropy_production());
    }
    for (_, gen) in davies_zoo() {
        let rho0 = DensityMatrix::maximally_mixed(gen.dim());
        let grid: Vec<f64> = (0..100).map(|k| k as f64).collect();
        sigma = sigma.min(trajectory(&gen, &rho0, &grid).unwrap().min_entropy_production());
    }
    let ramp = LinearRamp { start: qubit(2.0), end: qubit(1.0), t0: 0.0, t1: 20.0 };
    let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
    let rho0 = gibbs_state(&qubit(2.0), 1.0).unwrap();
    let led = adiabatic_propagate(&ramp, &[Coupling::new(Operator::pauli_x(), ohmic("b", 1.0, 0.1))], &rho0, &grid, AdiabaticOptions::default()).unwrap();
    sigma = sigma.min(led.min_entropy_production());
    let otto_min = otto_configurations().par_iter().map(|s| run_otto(s, 1).unwrap().entropy_production).reduce(|| f64::INFINITY, f64::min);
    let tri_max = tricycle_grid().iter().map(|r| r.second_law_value).fold(f64::NEG_INFINITY, f64::max);
    check(
        sigma >= -1e-9 && otto_min >= -1e-9 && tri_max <= 1e-9,
        format!("min sigma rate {sigma:.2e}; min Otto cycle production {otto_min:.2e} (81 configs); max tricycle sum J/T {tri_max:.2e} (20x20)"),
    )
}

fn random_floquet_points() -> Vec<qthermo_core::floquet::FloquetCurrents<f64>> {
    let mut rng = seeded(55);
    let pts: Vec<[f64; 4]> = (0..50)
        .map(|_| [uniform(0.55, 1.6, &mut rng), uniform(0.0, 0.4, &mut rng), uniform(0.3, 5.0, &mut rng), uniform(0.1, 2.0, &mut rng)])
        .collect();
    pts.par_iter()
        .map(|&[w, eps, th, tc]| {
            let dec = floquet_decompose(&CircularDrive { omega0: 1.0, amplitude: eps, drive_frequency: w, phase: 0.0 }, 64).unwrap();
            let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", th, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", tc, 0.05))];
            let fg = build_floquet_generator(&dec, &couplings, 5).unwrap();
            floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap())
        })
        .collect()
}

fn c6_first_law() -> Outcome {
    let ramp = LinearRamp { start: qubit(2.0), end: qubit(1.0), t0: 0.0, t1: 20.0 };
    let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
    let rho0 = gibbs_state(&qubit(2.0), 1.0).unwrap();
    let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", 1.5, 0.1)), Coupling::new(Operator::pauli_z(), ohmic("c", 0.5, 0.05))];
    let ledger = adiabatic_propagate(&ramp, &couplings[..1], &rho0, &grid, AdiabaticOptions::default()).unwrap().first_law_residual();
    let ledger2 = adiabatic_propagate(&ramp, &couplings, &rho0, &grid, AdiabaticOptions::default()).unwrap().first_law_residual();
    let tri = tricycle_grid().iter().map(|r| r.first_law_residual).fold(0.0, f64::max);
    let flo = random_floquet_points().iter().map(|c| c.first_law_residual).fold(0.0, f64::max);
    let led = ledger.max(ledger2);
    check(
        led <= 1e-6 && tri <= 1e-9 && flo <= 1e-8,
        format!("adiabatic ledger {led:.2e}; tricycle |sum J| {tri:.2e}; Floquet |P - sum J| {flo:.2e}"),
    )
}

fn c7_efficiency() -> Outcome {
    let r = run_otto(&otto(0.0, 400.0, 1.0, Protocol::Adiabatic), 1).unwrap();
    let eta = r.efficiency.unwrap_or(f64::NAN);
    let jc = tricycle_steady(&tricycle(0.5, 0.5)).unwrap().heat[1];
    check(
        (eta - 0.5).abs() <= 1e-8 && eta <= r.carnot_efficiency && jc.abs() <= 1e-8,
        format!("eta = {eta:.12} (eta_c = {}); tricycle boundary J_c = {jc:.2e}", r.carnot_efficiency),
    )
}

/// Efficiency at maximum power archived from the first run.
const ARCHIVED_ETA_MAX_POWER: f64 = 0.517871436214;

fn c8_max_power() -> Outcome {
    let fermi = |l: &str, t: f64| BathSpec::new(l, t, Statistics::Fermi, FormFactor::Flat { strength: 0.5, cutoff: 100.0 }).unwrap();
    let spec = CycleSpec::otto(
        WorkingMedium::qubit(),
        4.0,
        2.0,
        fermi("h", 4.0),
        fermi("c", 1.0),
        OttoDurations { hot: 1.0, expansion: 0.0, cold: 1.0, compression: 0.0 },
        Protocol::Adiabatic,
    );
    let bounds = [Bound { param: FreeParameter::OmegaHot, lower: 0.1, upper: 30.0 }, Bound { param: FreeParameter::OmegaCold, lower: 0.1, upper: 30.0 }];
    let o = optimize_power(&spec, &bounds, &OptimizerOptions::default()).unwrap();
    let eta = o.efficiency.unwrap_or(f64::NAN);
    let rel = (eta - o.eta_ca).abs() / o.eta_ca;
    check(
        rel <= 0.1 && (eta - ARCHIVED_ETA_MAX_POWER).abs() <= 1e-9,
        format!("eta at max power {eta:.12} vs eta_ca {:.3} ({:.1}% off, archived {ARCHIVED_ETA_MAX_POWER:.12})", o.eta_ca, 100.0 * rel),
    )
}

fn c9_trotter() -> Outcome {
    let taus: Vec<f64> = (0..7).map(|k| 0.4 * 0.5f64.powi(k)).collect();
    let t = sudden_limit_check(&otto(0.5, 1.0, 1.0, Protocol::Sudden), &taus).unwrap();
    let slope = t.slope.unwrap_or(f64::NAN);
    check((2.7..=3.3).contains(&slope), format!("fitted slope {slope:.3} over {} rows (raw split {:.3})", t.rows.iter().filter(|r| !r.flagged).count(), t.raw_slope.unwrap_or(f64::NAN)))
}

fn c10_friction() -> Outcome {
    let s = quantum_friction(&otto(0.5, 30.0, 1.0, Protocol::Sudden)).unwrap();
    let a = quantum_friction(&otto(0.5, 30.0, 1.0, Protocol::Adiabatic)).unwrap();
    let margin = s.cycle_work_adiabatic - s.cycle_work;
    check(
        margin > 0.0 && s.coherence_work > 0.0 && a.coherence_work.abs() <= 1e-9,
        format!("sudden extra work {:.4e} (cycle work loss {margin:.4e}); adiabatic margin {:.1e}", s.coherence_work, a.coherence_work),
    )
}

fn c11_third_law() -> Outcome {
    let family = |tc: f64, wc: f64| -> qthermo_core::Result<TricycleSpec<f64>> {
        Ok(TricycleSpec::new(
            1.0,
            wc,
            ohmic("h", 1.0, 0.01),
            bose("c", tc, FormFactor::PowerLaw { strength: 0.01, exponent: 3.0, cutoff: 20.0 }),
            flat("w", f64::INFINITY, 0.01),
        )
        .with_epsilon(1e-5))
    };
    let policy = SweepPolicy { ratio_lo: 0.2, ratio_hi: 8.0, omega_c_max: 0.95, tol: 1e-4 };
    let s = third_law_sweep(family, &[0.16, 0.08, 0.04, 0.02, 0.01], policy).unwrap();
    let p = s.exponent.unwrap_or(f64::NAN);
    let last = s.rows.last().map(|r| r.j_c).unwrap_or(f64::NAN);
    check(
        s.monotone && (2.5..=3.5).contains(&p) && s.ratio_cv <= 0.15,
        format!("monotone {}, exponent {p:.3}, omega_c*/T_c = {:.3} (CV {:.2}%), J_c(0.01) = {last:.2e}", s.monotone, s.ratio_mean, 100.0 * s.ratio_cv),
    )
}

fn c12_floquet() -> Outcome {
    let h0 = qubit(1.0);
    let drive = HarmonicDrive { h0: h0.clone(), v: Operator::zeros(2), drive_frequency: 0.7, phase: 0.0 };
    let couplings = [Coupling::new(Operator::pauli_x(), ohmic("h", 3.0, 0.05)), Coupling::new(Operator::pauli_x(), ohmic("c", 0.4, 0.02))];
    let fg = build_floquet_generator(&floquet_decompose(&drive, 32).unwrap(), &couplings, 5).unwrap();
    let cur = floquet_heat_currents(&fg, &stationary_state(&fg.generator).unwrap());
    let dav = build_davies(&h0, &couplings).unwrap();
    let jd = dav.heat_currents(stationary_state(&dav).unwrap().matrix());
    let diff = (0..2).map(|k| (cur.heat[k] - jd[k]).abs()).fold(0.0, f64::max);
    let second = random_floquet_points().iter().map(|c| c.second_law_value).fold(f64::NEG_INFINITY, f64::max);
    check(diff <= 1e-8 && second <= 1e-9, format!("zero-amplitude |J_F - J_D| {diff:.2e}; max sum J/T over 50 drives {second:.2e}"))
}

/// Seeded 8-spin gap archived from the first run.
const ARCHIVED_ETH_GAP: f64 = 2.416967521462e-2;

fn c13_eth() -> Outcome {
    let n = 8;
    let h = heisenberg_chain::<f64>(n, 1.0, 7).unwrap();
    let a = embed(&Operator::pauli_z(), n / 2, &vec![2; n]).unwrap();
    let cmp = diagonal_vs_microcanonical(&h, &neel_state::<f64>(n), &a, 1.0).unwrap();
    let frac = cmp.gap / cmp.observable_range;
    check(
        frac <= 0.1 && (cmp.gap - ARCHIVED_ETH_GAP).abs() <= 1e-9,
        format!("gap {:.12e} = {:.2}% of range ({} states in window, archived {ARCHIVED_ETH_GAP:.6e})", cmp.gap, 100.0 * frac, cmp.window_states),
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn c14_passivity() -> Outcome {
    let mut rng = seeded(77);
    let mut worst: f64 = 0.0;
    let mut min_erg = f64::INFINITY;
    for k in 0..500 {
        let d = 2 + k % 5;
        let rho = random_density::<f64>(d, &mut rng);
        let h = random_hermitian::<f64>(d, &mut rng);
        let erg = ergotropy(&rho, &h).unwrap();
        let e = eig_hermitian(&h).unwrap().values;
        let r = rho.eigenvalues();
        let passive_energy = permutations(d).iter().map(|p| (0..d).map(|i| r[p[i]] * e[i]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        let oracle = rho.expectation(&h) - passive_energy;
        worst = worst.max((erg - oracle).abs());
        min_erg = min_erg.min(erg);
    }
    let mut gibbs_ok = true;
    for k in 0..5 {
        let h = random_hermitian::<f64>(3, &mut rng);
        let g = gibbs_state(&h, 0.5 + k as f64).unwrap();
        gibbs_ok &= complete_passivity(&g, &h, 3).unwrap().first_failure.is_none();
    }
    let h = Operator::<f64>::diagonal(&[0.0, 1.0, 1.5]);
    let rho = DensityMatrix::diagonal(&[0.5, 0.5, 0.0]).unwrap();
    let cp = complete_passivity(&rho, &h, 3).unwrap();
    let counter = cp.passive[0] && cp.first_failure.is_some_and(|n| n <= 3);
    check(
        min_erg >= -1e-12 && worst <= 1e-10 && gibbs_ok && counter,
        format!("500 pairs: min ergotropy {min_erg:.2e}, oracle gap {worst:.2e}; Gibbs completely passive to n=3: {gibbs_ok}; passive non-Gibbs fails at n={:?}", cp.first_failure),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 CP and trace preservation", c1_cp_trace),
        ("2 zeroth law", c2_zeroth_law),
        ("3 detailed balance and KMS", c3_kms),
        ("4 H-theorem", c4_h_theorem),
        ("5 second law", c5_second_law),
        ("6 first law", c6_first_law),
        ("7 efficiency identities", c7_efficiency),
        ("8 efficiency at max power", c8_max_power),
        ("9 Trotter sudden limit", c9_trotter),
        ("10 quantum friction", c10_friction),
        ("11 third-law sweep", c11_third_law),
        ("12 Floquet consistency", c12_floquet),
        ("13 ETH desk scale", c13_eth),
        ("14 passivity", c14_passivity),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let (verdict, detail) = match std::panic::catch_unwind(f) {
            Ok(Ok(d)) => ("PASS", d),
            Ok(Err(d)) => ("FAIL", d),
            Err(_) => ("FAIL", "panicked".to_string()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {name}: {verdict} ({:.1}s) {detail}", t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 14 criteria passed", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
