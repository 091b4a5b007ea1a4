use std::fmt;

use super::decomposition::FloquetDecomposition;
use crate::error::{Error, Result};
use crate::gkls::{fmt_sig, BathInfo, Construction, Coupling, GklsGenerator, JumpChannel};
use crate::opcore::{group_levels, DensityMatrix, Operator};
use crate::scalar::{cr, fmax, frobenius, max_abs, CMatrix, Real, C};
use crate::tol;

/// Fourier component of `U_p^dagger S U_p` restricted to one averaged Bohr frequency.
#[derive(Clone, Debug)]
pub struct Harmonic<T: Real> {
    pub q: i64,
    pub omega_av: T,
    pub op: CMatrix<T>,
}

/// Splits `U^dagger(t) S U(t) = sum e^{-i omega_q t} S(omega_q)` into lines
/// `omega_q = omega_av + q W`, keeping `|q| <= q_max`.
pub fn harmonic_decompose<T: Real>(dec: &FloquetDecomposition<T>, s: &Operator<T>, q_max: usize) -> Result<Vec<Harmonic<T>>> {
    let d = dec.dim();
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
    }
    let n = dec.grid_points();
    if 2 * q_max + 1 > n {
        return Err(Error::InvalidParameter(format!("q_max = {q_max} needs more than {n} samples per period")));
    }
    let g: Vec<CMatrix<T>> = (0..n).map(|k| dec.periodic[k].adjoint() * s.matrix() * &dec.periodic[k]).collect();
    let nq = n as i64;
    let lo = -(nq / 2);
    let hi = lo + nq;
    let mut comps: Vec<(i64, CMatrix<T>)> = Vec::with_capacity(n);
    let mut total = T::zero();
    let mut tail = T::zero();
    for q in lo..hi {
        let mut acc = CMatrix::<T>::zeros(d, d);
        for (k, gk) in g.iter().enumerate() {
            let a = T::two_pi() * T::of((q * k as i64) as f64) / T::of(n as f64);
            acc += gk * C::new(a.cos(), a.sin());
        }
        acc /= cr(T::of(n as f64));
        let w = frobenius(&acc);
        total += w * w;
        if q.unsigned_abs() as usize > q_max {
            tail += w * w;
        } else {
            comps.push((q, acc));
        }
    }
    if total > T::zero() && (tail / total).sqrt() > T::of(tol::HARMONIC_TAIL) {
        return Err(Error::HarmonicTail { tail: (tail / total).sqrt().to_f64_lossy(), q_max });
    }
    let levels = group_levels(&dec.quasienergies, T::of(tol::BOHR_MERGE));
    let mut level_of = vec![0usize; d];
    for (li, l) in levels.iter().enumerate() {
        for i in l.indices.clone() {
            level_of[i] = li;
        }
    }
    let merge = T::of(tol::BOHR_MERGE) * fmax(T::one(), dec.omega);
    let mut avs: Vec<T> = Vec::new();
    for a in &levels {
        for b in &levels {
            avs.push(b.energy - a.energy);
        }
    }
    avs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut clusters: Vec<T> = Vec::new();
    for w in avs {
        if clusters.last().map_or(true, |&c| w - c > merge) {
            clusters.push(w);
        }
    }
    let find = |w: T| clusters.iter().position(|&c| (c - w).abs() <= merge).expect("cluster");
    let scale = fmax(T::one(), max_abs(s.matrix()));
    let mut out = Vec::new();
    for (q, sq) in comps {
        let se = dec.basis.adjoint() * &sq * &dec.basis;
        let mut parts: Vec<CMatrix<T>> = vec![CMatrix::zeros(d, d); clusters.len()];
        for i in 0..d {
            for j in 0..d {
                let w = levels[level_of[j]].energy - levels[level_of[i]].energy;
                parts[find(w)][(i, j)] = se[(i, j)];
            }
        }
        for (ci, p) in parts.into_iter().enumerate() {
            if max_abs(&p) <= T::of(tol::STRUCTURAL) * scale {
                continue;
            }
            out.push(Harmonic { q, omega_av: clusters[ci], op: &dec.basis * p * dec.basis.adjoint() });
        }
    }
    Ok(out)
}

/// Largest deviation of `sum_q e^{-i omega_q t} S(omega_q)` from
/// `U^dagger(t) S U(t)` over the decomposition sample times.
pub fn reconstruction_residual<T: Real>(dec: &FloquetDecomposition<T>, s: &Operator<T>, lines: &[Harmonic<T>]) -> T {
    let mut worst = T::zero();
    for (k, &t) in dec.times.iter().enumerate() {
        let u = &dec.propagators[k];
        let exact = u.adjoint() * s.matrix() * u;
        let mut sum = CMatrix::<T>::zeros(dec.dim(), dec.dim());
        for l in lines {
            let w = (l.omega_av + dec.omega * T::of(l.q as f64)) * t;
            sum += &l.op * C::new(w.cos(), -w.sin());
        }
        worst = fmax(worst, max_abs(&(exact - sum)));
    }
    worst
}

/// Dissipative channel of the Floquet generator.
#[derive(Clone, Debug)]
pub struct FloquetChannel<T: Real> {
    pub bath: usize,
    pub q: i64,
    pub omega_av: T,
    pub omega_q: T,
    pub op: CMatrix<T>,
    pub rate: T,
}

/// Floquet-Markov generator in the frame co-moving with `U_p`, where the
/// coherent part is `-i[H_av, ·]`.
#[derive(Clone, Debug)]
pub struct FloquetGenerator<T: Real> {
    pub generator: GklsGenerator<T>,
    pub channels: Vec<FloquetChannel<T>>,
    pub h_av: Operator<T>,
    pub omega: T,
    pub betas: Vec<T>,
    pub labels: Vec<String>,
}

/// Builds the Floquet generator for the given couplings.
pub fn build_floquet_generator<T: Real>(
    dec: &FloquetDecomposition<T>,
    couplings: &[Coupling<T>],
    q_max: usize,
) -> Result<FloquetGenerator<T>> {
    let mut baths: Vec<BathInfo<T>> = Vec::new();
    let mut channels = Vec::new();
    let mut jumps = Vec::new();
    let resolve = T::of(tol::BOHR_RESOLVE) * fmax(T::one(), dec.omega);
    for (ci, c) in couplings.iter().enumerate() {
        let b = match baths.iter().position(|x| x.label == c.bath.label()) {
            Some(k) => k,
            None => {
                baths.push(BathInfo { label: c.bath.label().to_string(), beta: Some(c.bath.beta()), mu: c.bath.chemical_potential() });
                baths.len() - 1
            }
        };
        let lines = harmonic_decompose(dec, &c.op, q_max)?;
        for (i, a) in lines.iter().enumerate() {
            let wa = a.omega_av + dec.omega * T::of(a.q as f64);
            for bl in &lines[i + 1..] {
                let wb = bl.omega_av + dec.omega * T::of(bl.q as f64);
                if (wa - wb).abs() <= resolve {
                    return Err(Error::CoincidentHarmonics(wa.to_f64_lossy()));
                }
            }
        }
        for l in lines {
            let omega_q = l.omega_av + dec.omega * T::of(l.q as f64);
            let rate = c.bath.spectral_density(omega_q)?;
            if rate == T::zero() {
                continue;
            }
            jumps.push(JumpChannel { bath: b, coupling: ci, frequency: omega_q, op: l.op.clone(), rate });
            channels.push(FloquetChannel { bath: b, q: l.q, omega_av: l.omega_av, omega_q, op: l.op, rate });
        }
    }
    let betas = baths.iter().map(|b| b.beta.expect("bath temperature")).collect();
    let labels = baths.iter().map(|b| b.label.clone()).collect();
    let generator = GklsGenerator::from_parts(dec.h_av.clone(), jumps, baths, Construction::Floquet)?;
    Ok(FloquetGenerator { generator, channels, h_av: dec.h_av.clone(), omega: dec.omega, betas, labels })
}

/// Operating regime of a driven machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Engine,
    Refrigerator,
    Dissipator,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::Dissipator => "dissipator",
        })
    }
}

/// Engine if the power output is positive, refrigerator if heat is drawn
/// from the coldest bath, dissipator otherwise.
pub fn classify_regime<T: Real>(power: T, heat: &[T], betas: &[T], tol: T) -> Regime {
    if power > tol {
        return Regime::Engine;
    }
    let coldest = (0..betas.len()).max_by(|&a, &b| betas[a].partial_cmp(&betas[b]).expect("finite")).unwrap_or(0);
    if heat.len() > 1 && heat[coldest] > tol {
        Regime::Refrigerator
    } else {
        Regime::Dissipator
    }
}

/// Steady-state energetics of a driven open system.
#[derive(Clone, Debug)]
pub struct FloquetCurrents<T: Real> {
    /// Heat into the system from each bath.
    pub heat: Vec<T>,
    /// Power delivered by the system to the drive, from drive-quanta counting.
    pub power: T,
    /// `|P - sum J|`.
    pub first_law_residual: T,
    /// `sum_j J_j / T_j` (should be `<= 0`).
    pub second_law_value: T,
    pub regime: Regime,
}

fn jump_rate<T: Real>(ch: &FloquetChannel<T>, rho: &CMatrix<T>) -> T {
    ch.rate * (ch.op.adjoint() * &ch.op * rho).trace().re
}

/// Heat current of one channel: `(omega_q / omega_av) Tr(H_av L_ch rho)`,
/// or the jump-counting form `-omega_q rate Tr(S^dagger S rho)` when
/// `omega_av = 0`.
pub fn channel_heat<T: Real>(fg: &FloquetGenerator<T>, ch: &FloquetChannel<T>, rho: &CMatrix<T>) -> T {
    let tol = T::of(tol::BOHR_MERGE) * fmax(T::one(), fg.omega);
    if ch.omega_av.abs() > tol {
        let v = &ch.op;
        let vdv = v.adjoint() * v;
        let l = (v * rho * v.adjoint() - (&vdv * rho + rho * &vdv) * cr(T::of(0.5))) * cr(ch.rate);
        ch.omega_q / ch.omega_av * fg.h_av.trace_with(&l).re
    } else {
        -ch.omega_q * jump_rate(ch, rho)
    }
}

/// Per-bath heat currents, power and the law checks at the state `rho0`
/// (normally the stationary state of the Floquet generator).
pub fn floquet_heat_currents<T: Real>(fg: &FloquetGenerator<T>, rho0: &DensityMatrix<T>) -> FloquetCurrents<T> {
    let nb = fg.betas.len();
    let mut heat = vec![T::zero(); nb];
    let mut quanta = T::zero();
    for ch in &fg.channels {
        heat[ch.bath] += channel_heat(fg, ch, rho0.matrix());
        quanta += T::of(ch.q as f64) * jump_rate(ch, rho0.matrix());
    }
    let power = -fg.omega * quanta;
    let jsum = heat.iter().fold(T::zero(), |a, &b| a + b);
    let second = heat.iter().zip(fg.betas.iter()).fold(T::zero(), |a, (&j, &b)| a + if b == T::zero() { T::zero() } else { j * b });
    let scale = heat.iter().fold(power.abs(), |a, &b| fmax(a, b.abs()));
    let regime = classify_regime(power, &heat, &fg.betas, T::tol(tol::DYNAMICAL) * fmax(scale, T::epsilon()));
    FloquetCurrents { heat, power, first_law_residual: (power - jsum).abs(), second_law_value: second, regime }
}

/// Limit-cycle states `U_p(t_k) rho0 U_p^dagger(t_k)` on the decomposition grid.
pub fn limit_cycle<T: Real>(dec: &FloquetDecomposition<T>, rho0: &DensityMatrix<T>) -> Result<Vec<DensityMatrix<T>>> {
    if rho0.dim() != dec.dim() {
        return Err(Error::DimensionMismatch { expected: dec.dim(), found: rho0.dim() });
    }
    dec.periodic.iter().map(|up| DensityMatrix::from_dynamics(up * rho0.matrix() * up.adjoint())).collect()
}

/// Limit-cycle report: one row per scanned parameter value, columns
/// `param,J_<bath>...,P,second_law_value,regime`.
pub fn limit_cycle_csv<T: Real>(labels: &[String], rows: &[(T, FloquetCurrents<T>)]) -> String {
    let mut out = String::from("param");
    for l in labels {
        out.push_str(&format!(",J_{l}"));
    }
    out.push_str(",P,second_law_value,regime\n");
    for (p, c) in rows {
        out.push_str(&fmt_sig(*p));
        for j in &c.heat {
            out.push(',');
            out.push_str(&fmt_sig(*j));
        }
        out.push_str(&format!(",{},{},{}\n", fmt_sig(c.power), fmt_sig(c.second_law_value), c.regime));
    }
    out
}
