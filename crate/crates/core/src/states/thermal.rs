use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, DensityMatrix, Operator, SpectralDecomposition};
use crate::scalar::{cr, CMatrix, Real};
use crate::tol;

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta >= T::zero()) {
        return Err(Error::NegativeBeta(beta.to_f64_lossy()));
    }
    Ok(())
}

/// Boltzmann weights of the sorted spectrum, shifted by the ground energy.
/// `beta = inf` puts uniform weight on the ground level.
pub(crate) fn boltzmann_weights<T: Real>(values: &[T], beta: T) -> Vec<T> {
    let e0 = values[0];
    if !beta.is_finite() {
        let thresh = T::of(tol::BOHR_MERGE) * crate::scalar::fmax(T::one(), values[values.len() - 1] - e0);
        let w: Vec<T> = values.iter().map(|&e| if e - e0 <= thresh { T::one() } else { T::zero() }).collect();
        let n = w.iter().fold(T::zero(), |a, &b| a + b);
        return w.into_iter().map(|x| x / n).collect();
    }
    let w: Vec<T> = values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z = w.iter().fold(T::zero(), |a, &b| a + b);
    w.into_iter().map(|x| x / z).collect()
}

/// `exp(-beta H) / Z`; `beta = 0` gives the maximally mixed state and
/// `beta = inf` the uniform mixture over the ground level.
pub fn gibbs_state<T: Real>(h: &Operator<T>, beta: T) -> Result<DensityMatrix<T>> {
    check_beta(beta)?;
    let eig = eig_hermitian(h)?;
    Ok(gibbs_from_spectrum(&eig, beta))
}

pub(crate) fn gibbs_from_spectrum<T: Real>(eig: &SpectralDecomposition<T>, beta: T) -> DensityMatrix<T> {
    let w = boltzmann_weights(&eig.values, beta);
    let d = eig.dim();
    let mut scaled = eig.vectors.clone();
    for j in 0..d {
        for i in 0..d {
            scaled[(i, j)] *= cr(w[j]);
        }
    }
    DensityMatrix::unchecked(&scaled * eig.vectors.adjoint())
}

/// `ln Z = ln Tr exp(-beta H)` for finite `beta`.
pub fn log_partition_function<T: Real>(h: &Operator<T>, beta: T) -> Result<T> {
    check_beta(beta)?;
    if !beta.is_finite() {
        return Err(Error::InvalidParameter("log partition function needs finite beta".into()));
    }
    let eig = eig_hermitian(h)?;
    let e0 = eig.values[0];
    let s = eig.values.iter().fold(T::zero(), |a, &e| a + (-beta * (e - e0)).exp());
    Ok(s.ln() - beta * e0)
}

/// Equilibrium free energy `-ln Z / beta` (`E_0` at zero temperature).
pub fn free_energy<T: Real>(h: &Operator<T>, beta: T) -> Result<T> {
    check_beta(beta)?;
    if beta == T::zero() {
        return Err(Error::InvalidParameter("free energy diverges at infinite temperature".into()));
    }
    if !beta.is_finite() {
        return Ok(eig_hermitian(h)?.values[0]);
    }
    Ok(-log_partition_function(h, beta)? / beta)
}

/// Normalized projector onto the eigenspace of the largest eigenvalue `<= energy`.
pub fn microcanonical_state<T: Real>(h: &Operator<T>, energy: T) -> Result<DensityMatrix<T>> {
    let eig = eig_hermitian(h)?;
    let levels = eig.levels(T::of(tol::BOHR_MERGE));
    let lvl = levels
        .iter()
        .rev()
        .find(|l| l.energy <= energy + T::of(tol::STRUCTURAL) * crate::scalar::fmax(T::one(), energy.abs()))
        .ok_or(Error::EnergyBelowSpectrum(energy.to_f64_lossy()))?;
    let n = T::of(lvl.indices.len() as f64);
    Ok(DensityMatrix::unchecked(eig.projector(lvl.indices.clone()) * cr(T::one() / n)))
}

/// Uniform mixture over eigenstates with `|E_n - energy| <= width / 2`.
pub fn microcanonical_window<T: Real>(h: &Operator<T>, energy: T, width: T) -> Result<DensityMatrix<T>> {
    let eig = eig_hermitian(h)?;
    let idx: Vec<usize> = (0..eig.dim()).filter(|&k| (eig.values[k] - energy).abs() <= width / T::of(2.0)).collect();
    if idx.is_empty() {
        return Err(Error::EmptyWindow { energy: energy.to_f64_lossy(), width: width.to_f64_lossy() });
    }
    let d = eig.dim();
    let mut m = CMatrix::zeros(d, d);
    let w = cr(T::one() / T::of(idx.len() as f64));
    for &k in &idx {
        let v = eig.vectors.column(k);
        m += (&v * v.adjoint()) * w;
    }
    Ok(DensityMatrix::unchecked(m))
}

/// Removes coherences between distinct energy levels of `h`.
pub fn dephase<T: Real>(rho: &DensityMatrix<T>, h: &Operator<T>) -> Result<DensityMatrix<T>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho.dim() });
    }
    let eig = eig_hermitian(h)?;
    let d = eig.dim();
    let mut out = CMatrix::zeros(d, d);
    for l in eig.levels(T::of(tol::BOHR_MERGE)) {
        let p = eig.projector(l.indices);
        out += &p * rho.matrix() * &p;
    }
    Ok(DensityMatrix::unchecked(out))
}
