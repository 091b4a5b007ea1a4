use crate::baths::BathSpec;
use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, eigh, kron, DensityMatrix, Operator, SpectralDecomposition, Superoperator};
use crate::scalar::{ci, cr, fmax, max_abs, CMatrix, Real};
use crate::states::thermal::gibbs_from_spectrum;
use crate::tol;

/// System operator coupled to a bath.
#[derive(Clone, Debug)]
pub struct Coupling<T: Real> {
    pub op: Operator<T>,
    pub bath: BathSpec<T>,
}

impl<T: Real> Coupling<T> {
    pub fn new(op: Operator<T>, bath: BathSpec<T>) -> Self {
        Self { op, bath }
    }
}

/// Bath bookkeeping attached to a generator.
#[derive(Clone, Debug, PartialEq)]
pub struct BathInfo<T: Real> {
    pub label: String,
    /// `None` for phenomenological generators without a temperature.
    pub beta: Option<T>,
    pub mu: T,
}

/// One Lindblad term `rate * D[op]`.
#[derive(Clone, Debug)]
pub struct JumpChannel<T: Real> {
    /// Index into [`GklsGenerator::baths`].
    pub bath: usize,
    /// Index of the originating coupling (Davies) or of the jump (direct).
    pub coupling: usize,
    /// Energy given to the bath per jump (`E_m - E_n` for `P_n S P_m`).
    pub frequency: T,
    pub op: CMatrix<T>,
    pub rate: T,
}

/// How a generator was assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Direct,
    Davies,
    Floquet,
}

/// Phenomenological jump for [`GklsGenerator::from_jumps`].
#[derive(Clone, Debug)]
pub struct Jump<T: Real> {
    pub bath: String,
    pub op: Operator<T>,
    pub rate: T,
}

/// GKLS generator `L rho = -i[H, rho] + sum_k L_k rho`, with the dissipator
/// split per bath.
#[derive(Clone, Debug)]
pub struct GklsGenerator<T: Real> {
    hamiltonian: Operator<T>,
    lamb_shift: Option<Operator<T>>,
    channels: Vec<JumpChannel<T>>,
    baths: Vec<BathInfo<T>>,
    construction: Construction,
    liouvillian: Superoperator<T>,
    spectrum: SpectralDecomposition<T>,
}

fn bath_index<T: Real>(baths: &mut Vec<BathInfo<T>>, label: &str, beta: Option<T>, mu: T) -> Result<usize> {
    if let Some(k) = baths.iter().position(|b| b.label == label) {
        if baths[k].beta != beta || baths[k].mu != mu {
            return Err(Error::InvalidParameter(format!("bath '{label}' declared with two different temperatures")));
        }
        return Ok(k);
    }
    baths.push(BathInfo { label: label.to_string(), beta, mu });
    Ok(baths.len() - 1)
}

impl<T: Real> GklsGenerator<T> {
    /// Generator with explicitly given jump operators and rates.
    pub fn from_jumps(h: Operator<T>, jumps: Vec<Jump<T>>) -> Result<Self> {
        let spectrum = eig_hermitian(&h)?;
        let d = h.dim();
        let mut baths = Vec::new();
        let mut channels = Vec::new();
        for (k, j) in jumps.into_iter().enumerate() {
            if j.op.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: j.op.dim() });
            }
            if !(j.rate >= T::zero()) {
                return Err(Error::InvalidParameter(format!("negative rate {}", j.rate.to_f64_lossy())));
            }
            let b = bath_index(&mut baths, &j.bath, None, T::zero())?;
            channels.push(JumpChannel { bath: b, coupling: k, frequency: T::zero(), op: j.op.into_matrix(), rate: j.rate });
        }
        Ok(Self::assemble(h, None, channels, baths, Construction::Direct, spectrum))
    }

    pub(crate) fn from_parts(
        h: Operator<T>,
        channels: Vec<JumpChannel<T>>,
        baths: Vec<BathInfo<T>>,
        construction: Construction,
    ) -> Result<Self> {
        let spectrum = eig_hermitian(&h)?;
        Ok(Self::assemble(h, None, channels, baths, construction, spectrum))
    }

    fn assemble(
        h: Operator<T>,
        lamb_shift: Option<Operator<T>>,
        channels: Vec<JumpChannel<T>>,
        baths: Vec<BathInfo<T>>,
        construction: Construction,
        spectrum: SpectralDecomposition<T>,
    ) -> Self {
        let heff = match &lamb_shift {
            Some(ls) => &h + ls,
            None => h.clone(),
        };
        let mut l = Superoperator::hamiltonian(&heff).into_matrix();
        for ch in &channels {
            l += Superoperator::dissipator(&ch.op, ch.rate).into_matrix();
        }
        let liouvillian = Superoperator::from_matrix(l).expect("finite generator");
        Self { hamiltonian: h, lamb_shift, channels, baths, construction, liouvillian, spectrum }
    }

    /// Adds a Lamb-shift Hamiltonian, which must commute with `H`.
    pub fn with_lamb_shift(self, ls: Operator<T>) -> Result<Self> {
        if !ls.is_hermitian() {
            return Err(Error::NotHermitian { residual: crate::opcore::hermitian_residual(ls.matrix()).to_f64_lossy() });
        }
        let c = self.hamiltonian.commutator_norm(&ls);
        if c > T::tol(tol::ALGEBRAIC) * fmax(T::one(), max_abs(self.hamiltonian.matrix())) {
            return Err(Error::NotCommuting(c.to_f64_lossy()));
        }
        Ok(Self::assemble(self.hamiltonian, Some(ls), self.channels, self.baths, self.construction, self.spectrum))
    }

    /// Attaches an inverse temperature to a bath of a direct generator.
    pub fn with_bath_temperature(mut self, label: &str, beta: T) -> Result<Self> {
        let b = self
            .baths
            .iter_mut()
            .find(|b| b.label == label)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bath '{label}'")))?;
        if !(beta >= T::zero()) {
            return Err(Error::NegativeBeta(beta.to_f64_lossy()));
        }
        b.beta = Some(beta);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator<T> {
        &self.hamiltonian
    }

    pub fn lamb_shift(&self) -> Option<&Operator<T>> {
        self.lamb_shift.as_ref()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition<T> {
        &self.spectrum
    }

    pub fn channels(&self) -> &[JumpChannel<T>] {
        &self.channels
    }

    pub fn baths(&self) -> &[BathInfo<T>] {
        &self.baths
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn liouvillian(&self) -> &Superoperator<T> {
        &self.liouvillian
    }

    /// `-i[H + H_LS, ·]`.
    pub fn hamiltonian_part(&self) -> Superoperator<T> {
        match &self.lamb_shift {
            Some(ls) => Superoperator::hamiltonian(&(&self.hamiltonian + ls)),
            None => Superoperator::hamiltonian(&self.hamiltonian),
        }
    }

    /// Dissipator of bath `k` as a superoperator.
    pub fn dissipator(&self, k: usize) -> Superoperator<T> {
        let d = self.dim();
        let mut s = Superoperator::zeros(d);
        for ch in self.channels.iter().filter(|c| c.bath == k) {
            s = &s + &Superoperator::dissipator(&ch.op, ch.rate);
        }
        s
    }

    /// `L_k rho` in operator form.
    pub fn apply_bath(&self, k: usize, rho: &CMatrix<T>) -> CMatrix<T> {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        let half = cr(T::of(0.5));
        for ch in self.channels.iter().filter(|c| c.bath == k) {
            let v = &ch.op;
            let vdv = v.adjoint() * v;
            let term = v * rho * v.adjoint() - (&vdv * rho + rho * &vdv) * half;
            out += term * cr(ch.rate);
        }
        out
    }

    /// `L rho` in operator form.
    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let heff = match &self.lamb_shift {
            Some(ls) => (&self.hamiltonian + ls).into_matrix(),
            None => self.hamiltonian.matrix().clone(),
        };
        let mut out = (&heff * rho - rho * &heff) * -ci::<T>();
        for k in 0..self.baths.len() {
            out += self.apply_bath(k, rho);
        }
        out
    }

    /// Heat currents `J_k = Tr(H L_k rho)` into the system, one per bath.
    pub fn heat_currents(&self, rho: &CMatrix<T>) -> Vec<T> {
        (0..self.baths.len()).map(|k| self.hamiltonian.trace_with(&self.apply_bath(k, rho)).re).collect()
    }

    /// Largest entry of `L_k rho_k` for the Gibbs state of each bath's temperature.
    pub fn gibbs_residual(&self) -> Result<T> {
        let mut worst = T::zero();
        for (k, b) in self.baths.iter().enumerate() {
            let beta = b.beta.ok_or_else(|| Error::MissingTemperature(b.label.clone()))?;
            let g = gibbs_from_spectrum(&self.spectrum, beta);
            worst = fmax(worst, max_abs(&self.apply_bath(k, g.matrix())));
        }
        Ok(worst)
    }

    /// Largest relative detailed-balance defect over pairs of channels at
    /// `±omega` from the same coupling.
    pub fn detailed_balance_residual(&self) -> Result<T> {
        let mut worst = T::zero();
        for a in &self.channels {
            if a.frequency <= T::zero() {
                continue;
            }
            let b = &self.baths[a.bath];
            let beta = b.beta.ok_or_else(|| Error::MissingTemperature(b.label.clone()))?;
            let partner = self.channels.iter().find(|c| {
                c.coupling == a.coupling && c.bath == a.bath && (c.frequency + a.frequency).abs() <= T::of(tol::BOHR_MERGE) * fmax(T::one(), a.frequency)
            });
            let absorb = partner.map(|c| c.rate).unwrap_or(T::zero());
            let expected = if beta.is_finite() { (-beta * (a.frequency - b.mu)).exp() * a.rate } else { T::zero() };
            let diff = (absorb - expected).abs();
            if diff > T::zero() {
                worst = fmax(worst, diff / fmax(expected, T::of(f64::MIN_POSITIVE)));
            }
        }
        Ok(worst)
    }

    /// Largest entry of `[H_super, D]` where `D` is the total dissipator.
    pub fn hamiltonian_dissipator_commutator(&self) -> T {
        let h = self.hamiltonian_part();
        let dis = &self.liouvillian - &h;
        max_abs(&(h.matrix() * dis.matrix() - dis.matrix() * h.matrix()))
    }

    /// Largest matrix element (in the energy eigenbasis) by which the
    /// dissipator maps populations to inter-level coherences or back.
    pub fn population_coherence_coupling(&self) -> T {
        let d = self.dim();
        let v = &self.spectrum.vectors;
        let levels = self.spectrum.levels(T::of(tol::BOHR_MERGE));
        let mut level_of = vec![0usize; d];
        for (li, l) in levels.iter().enumerate() {
            for i in l.indices.clone() {
                level_of[i] = li;
            }
        }
        let dis = |x: &CMatrix<T>| {
            let mut out = CMatrix::zeros(d, d);
            for k in 0..self.baths.len() {
                out += self.apply_bath(k, x);
            }
            out
        };
        let mut worst = T::zero();
        for a in 0..d {
            for b in 0..d {
                let xin = v.column(a) * v.column(b).adjoint();
                let y = v.adjoint() * dis(&xin) * v;
                let input_pop = a == b;
                for i in 0..d {
                    for j in 0..d {
                        let out_coh = level_of[i] != level_of[j];
                        let in_coh = level_of[a] != level_of[b];
                        if (input_pop && out_coh) || (in_coh && i == j) {
                            worst = fmax(worst, y[(i, j)].norm_sqr().sqrt());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Dimension of the commutant of `{H, S_w, S_w^dagger}`; one means the
    /// stationary state is unique.
    pub fn commutant_dimension(&self) -> usize {
        let d = self.dim();
        let id = CMatrix::<T>::identity(d, d);
        let comm = |a: &CMatrix<T>| kron(&id, a) - kron(&a.transpose(), &id);
        let mut gram = {
            let c = comm(self.hamiltonian.matrix());
            c.adjoint() * c
        };
        for ch in &self.channels {
            if ch.rate == T::zero() {
                continue;
            }
            for a in [ch.op.clone(), ch.op.adjoint()] {
                let c = comm(&a);
                gram += c.adjoint() * c;
            }
        }
        let ev = eigh(&gram).values;
        let top = fmax(T::one(), ev[ev.len() - 1]);
        ev.iter().filter(|&&x| x <= T::tol(tol::ALGEBRAIC) * top).count()
    }
}

/// Davies (weak-coupling, secular) generator for `H` and its couplings.
pub fn build_davies<T: Real>(h: &Operator<T>, couplings: &[Coupling<T>]) -> Result<GklsGenerator<T>> {
    let eig = eig_hermitian(h)?;
    let d = h.dim();
    for c in couplings {
        if c.op.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: c.op.dim() });
        }
    }
    let levels = eig.levels(T::of(tol::BOHR_MERGE));
    let range = fmax(T::one(), eig.values[d - 1] - eig.values[0]);
    let mut gaps: Vec<(T, usize, usize)> = Vec::new();
    for (m, lm) in levels.iter().enumerate() {
        for (n, ln) in levels.iter().enumerate() {
            gaps.push((lm.energy - ln.energy, m, n));
        }
    }
    gaps.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gaps"));
    // cluster[(m, n)] = Bohr-frequency cluster of the level pair (upper m, lower n)
    let nl = levels.len();
    let mut cluster_of = vec![0usize; nl * nl];
    let mut freqs: Vec<T> = Vec::new();
    let merge = T::of(tol::BOHR_MERGE) * range;
    let resolve = T::of(tol::BOHR_RESOLVE) * range;
    let mut k = 0;
    while k < gaps.len() {
        let start = k;
        let mut sum = T::zero();
        while k < gaps.len() && gaps[k].0 - gaps[start].0 <= merge {
            sum += gaps[k].0;
            cluster_of[gaps[k].1 * nl + gaps[k].2] = freqs.len();
            k += 1;
        }
        let w = sum / T::of((k - start) as f64);
        if let Some(&prev) = freqs.last() {
            if w - prev <= resolve {
                return Err(Error::UnresolvedBohrGaps { a: prev.to_f64_lossy(), b: w.to_f64_lossy() });
            }
        }
        freqs.push(w);
    }
    let mut level_of = vec![0usize; d];
    for (li, l) in levels.iter().enumerate() {
        for i in l.indices.clone() {
            level_of[i] = li;
        }
    }
    let mut baths = Vec::new();
    let mut channels = Vec::new();
    for (ci_, c) in couplings.iter().enumerate() {
        let b = bath_index(&mut baths, c.bath.label(), Some(c.bath.beta()), c.bath.chemical_potential())?;
        let se = eig.to_eigenbasis(c.op.matrix());
        let scale = fmax(T::one(), max_abs(&se));
        let mut parts: Vec<CMatrix<T>> = vec![CMatrix::zeros(d, d); freqs.len()];
        for i in 0..d {
            for j in 0..d {
                // entry <i|S|j> lowers the energy by E_j - E_i
                let cl = cluster_of[level_of[j] * nl + level_of[i]];
                parts[cl][(i, j)] = se[(i, j)];
            }
        }
        for (cl, part) in parts.into_iter().enumerate() {
            if max_abs(&part) <= T::of(tol::STRUCTURAL) * scale {
                continue;
            }
            let rate = c.bath.spectral_density(freqs[cl])?;
            if rate == T::zero() {
                continue;
            }
            channels.push(JumpChannel { bath: b, coupling: ci_, frequency: freqs[cl], op: eig.from_eigenbasis(&part), rate });
        }
    }
    Ok(GklsGenerator::assemble(h.clone(), None, channels, baths, Construction::Davies, eig))
}

/// Gibbs state of the generator's Hamiltonian at `beta`.
pub fn generator_gibbs<T: Real>(gen: &GklsGenerator<T>, beta: T) -> DensityMatrix<T> {
    gibbs_from_spectrum(gen.spectrum(), beta)
}
