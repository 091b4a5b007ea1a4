use super::generator::GklsGenerator;
use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, null_space, propagator, unvec, vec, DensityMatrix};
use crate::scalar::{cr, CMatrix, Real};
use crate::states::log_regularized;
use crate::tol;

/// `exp(L t) rho0`.
pub fn propagate<T: Real>(gen: &GklsGenerator<T>, rho0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), found: rho0.dim() });
    }
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    if t == T::zero() {
        return Ok(rho0.clone());
    }
    propagator(gen.liouvillian(), t)?.apply_state(rho0)
}

/// Unique stationary state from the null space of the Liouvillian.
pub fn stationary_state<T: Real>(gen: &GklsGenerator<T>) -> Result<DensityMatrix<T>> {
    let ns = null_space(gen.liouvillian().matrix(), T::of(tol::NULL_SPACE))?;
    if ns.len() != 1 {
        return Err(Error::DegenerateNullSpace(ns.len()));
    }
    let m = unvec(&ns[0], gen.dim());
    let tr = m.trace();
    if tr.norm_sqr().sqrt() <= T::epsilon() {
        return Err(Error::Numerical("stationary vector has zero trace".into()));
    }
    DensityMatrix::from_dynamics(m * (cr(T::one()) / tr))
}

/// Spohn entropy production
/// `sigma = sum_k -Tr[(L_k rho)(ln rho - ln rho_k)]`, with `rho_k` the Gibbs
/// state at the temperature of bath `k`. Equals `dS/dt - sum_k beta_k J_k`.
pub fn entropy_production_rate<T: Real>(gen: &GklsGenerator<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let lnrho = log_regularized(rho.matrix());
    let h = gen.hamiltonian();
    let mut sigma = T::zero();
    for (k, b) in gen.baths().iter().enumerate() {
        let beta = b.beta.ok_or_else(|| Error::MissingTemperature(b.label.clone()))?;
        if b.mu != T::zero() {
            return Err(Error::InvalidParameter(format!(
                "bath '{}' has a chemical potential; entropy production needs a particle-number operator",
                b.label
            )));
        }
        let lk = gen.apply_bath(k, rho.matrix());
        let entropy_flow = -(&lk * &lnrho).trace().re;
        let j = h.trace_with(&lk).re;
        let heat_term = if beta.is_finite() {
            beta * j
        } else if j.abs() <= T::of(1e-14) {
            T::zero()
        } else if j > T::zero() {
            T::infinity()
        } else {
            -T::infinity()
        };
        sigma += entropy_flow - heat_term;
    }
    Ok(sigma)
}

/// `dS/dt = -Tr(L rho ln rho)` from the assembled Liouvillian.
pub fn entropy_rate<T: Real>(gen: &GklsGenerator<T>, rho: &DensityMatrix<T>) -> T {
    let lnrho = log_regularized(rho.matrix());
    let lr = unvec(&(gen.liouvillian().matrix() * vec(rho.matrix())), gen.dim());
    -(&lr * &lnrho).trace().re
}

/// Energy derivative `Tr(H L rho)` through the assembled Liouvillian.
pub(crate) fn energy_rate_superop<T: Real>(gen: &GklsGenerator<T>, rho: &CMatrix<T>) -> T {
    let lr = unvec(&(gen.liouvillian().matrix() * vec(rho)), gen.dim());
    gen.hamiltonian().trace_with(&lr).re
}

/// Fixes `ln rho_k` explicitly for generators with a Davies Hamiltonian;
/// used as an independent route in tests.
pub fn entropy_production_explicit<T: Real>(gen: &GklsGenerator<T>, rho: &DensityMatrix<T>) -> Result<T> {
    let lnrho = log_regularized(rho.matrix());
    let eig = eig_hermitian(gen.hamiltonian())?;
    let mut sigma = T::zero();
    for (k, b) in gen.baths().iter().enumerate() {
        let beta = b.beta.ok_or_else(|| Error::MissingTemperature(b.label.clone()))?;
        if !beta.is_finite() {
            return Err(Error::InvalidParameter("explicit route needs finite temperatures".into()));
        }
        let e0 = eig.values[0];
        let lz = eig.values.iter().fold(T::zero(), |a, &e| a + (-beta * (e - e0)).exp()).ln();
        let ln_gibbs = eig.map(|e| -beta * (e - e0) - lz);
        let lk = gen.apply_bath(k, rho.matrix());
        sigma -= (&lk * (&lnrho - ln_gibbs)).trace().re;
    }
    Ok(sigma)
}
