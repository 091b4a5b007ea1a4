use super::cycle::CycleSpec;
use crate::error::{Error, Result};
use crate::gkls::{build_davies, Coupling};
use crate::opcore::{propagator, spectral_norm, Superoperator};
use crate::scalar::{fmax, Real};

/// Row of the sudden-limit table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterRow<T: Real> {
    pub tau: T,
    /// `|U_cyc(tau) - exp(sum_j L_j tau)|` for the split as written.
    pub raw_error: T,
    /// Same after the cyclic similarity `M^-1 U_cyc M`,
    /// `M = exp(L_ch tau/2) exp(L_c tau/2)`.
    pub error: T,
    /// Excluded from the fit: outside the asymptotic range or at roundoff.
    pub flagged: bool,
}

/// Sudden-limit (short-stroke) comparison of a four-stroke cycle with the
/// continuous generator `L_h + L_hc + L_c + L_ch`.
#[derive(Clone, Debug)]
pub struct TrotterTable<T: Real> {
    pub rows: Vec<TrotterRow<T>>,
    /// Least-squares slope of `log error` against `log tau` over unflagged rows.
    pub slope: Option<T>,
    /// Same for the raw error.
    pub raw_slope: Option<T>,
    /// `max_j |L_j|`.
    pub generator_norm: T,
}

/// Rows with `tau * max|L_j|` above this are outside the asymptotic regime.
pub const ASYMPTOTIC_LIMIT: f64 = 0.5;
/// Errors below this are treated as roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Short-stroke generators of an Otto cycle: Davies generators of the two
/// isochores and a shared work generator `-i[H(omega_bar), ·]` for both
/// unitary strokes, `omega_bar = (omega_h + omega_c)/2`.
pub fn sudden_generators<T: Real>(spec: &CycleSpec<T>) -> Result<[Superoperator<T>; 4]> {
    spec.validate()?;
    let m = &spec.medium;
    let lh = build_davies(&m.hamiltonian(spec.omega_h), &[Coupling::new(m.coupling(), spec.hot.clone())])?;
    let lc = build_davies(&m.hamiltonian(spec.omega_c), &[Coupling::new(m.coupling(), spec.cold.clone())])?;
    let w = Superoperator::hamiltonian(&m.hamiltonian((spec.omega_h + spec.omega_c) * T::of(0.5)));
    Ok([lh.liouvillian().clone(), w.clone(), lc.liouvillian().clone(), w])
}

/// Tabulates the split error `e^{L_ch tau/2} e^{L_c tau} e^{L_hc tau} e^{L_h tau} e^{L_ch tau/2}`
/// against `exp((L_h + L_hc + L_c + L_ch) tau)`.
pub fn sudden_limit_check<T: Real>(spec: &CycleSpec<T>, taus: &[T]) -> Result<TrotterTable<T>> {
    let gens = sudden_generators(spec)?;
    trotter_table(&gens, taus)
}

/// As [`sudden_limit_check`] for explicit generators `[L_h, L_hc, L_c, L_ch]`.
pub fn trotter_table<T: Real>(gens: &[Superoperator<T>; 4], taus: &[T]) -> Result<TrotterTable<T>> {
    let [lh, lhc, lc, lch] = gens;
    let total = &(&(lh + lhc) + lc) + lch;
    let norm = gens.iter().fold(T::zero(), |a, g| fmax(a, spectral_norm(g.matrix())));
    let half = T::of(0.5);
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(tau > T::zero()) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        let e = |l: &Superoperator<T>, s: T| propagator(l, s * tau);
        let ch_half = e(lch, half)?;
        let split = ch_half.compose(&e(lc, T::one())?).compose(&e(lhc, T::one())?).compose(&e(lh, T::one())?).compose(&ch_half);
        let exact = e(&total, T::one())?;
        let raw_error = spectral_norm((&split - &exact).matrix());
        // M^-1 U M with M = e^{L_ch tau/2} e^{L_c tau/2}
        let m = ch_half.compose(&e(lc, half)?);
        let m_inv = e_neg(lc, half * tau)?.compose(&e_neg(lch, half * tau)?);
        let rephased = m_inv.compose(&split).compose(&m);
        let error = spectral_norm((&rephased - &exact).matrix());
        let flagged = tau * norm > T::of(ASYMPTOTIC_LIMIT) || error < T::of(ROUNDOFF_FLOOR);
        rows.push(TrotterRow { tau, raw_error, error, flagged });
    }
    let slope = fit_slope(rows.iter().filter(|r| !r.flagged).map(|r| (r.tau, r.error)));
    let raw_slope = fit_slope(rows.iter().filter(|r| !r.flagged && r.raw_error >= T::of(ROUNDOFF_FLOOR)).map(|r| (r.tau, r.raw_error)));
    Ok(TrotterTable { rows, slope, raw_slope, generator_norm: norm })
}

fn e_neg<T: Real>(l: &Superoperator<T>, t: T) -> Result<Superoperator<T>> {
    propagator(&l.scale(-T::one()), t)
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two points.
pub fn fit_slope<T: Real>(points: impl Iterator<Item = (T, T)>) -> Option<T> {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.to_f64_lossy().ln(), y.to_f64_lossy().ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| T::of(sxy / sxx))
}
