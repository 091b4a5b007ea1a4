use super::dynamics::{energy_rate_superop, entropy_production_rate};
use super::generator::{build_davies, Coupling, GklsGenerator};
use super::ledger::{LedgerRow, ThermoLedger};
use crate::error::{Error, Result};
use crate::opcore::{propagator, DensityMatrix, Operator, Superoperator};
use crate::scalar::{fmax, fmin, Real};
use crate::states::von_neumann_entropy;

/// Time-dependent Hamiltonian.
pub trait Schedule<T: Real>: Sync {
    fn hamiltonian(&self, t: T) -> Result<Operator<T>>;

    /// `dH/dt`; defaults to a central difference.
    fn derivative(&self, t: T) -> Result<Operator<T>> {
        let h = T::of(1e-5) * fmax(T::one(), t.abs());
        let a = self.hamiltonian(t + h)?;
        let b = self.hamiltonian(t - h)?;
        Ok((&a - &b).scale(T::one() / (h + h)))
    }
}

/// Time-independent Hamiltonian.
#[derive(Clone, Debug)]
pub struct ConstantSchedule<T: Real>(pub Operator<T>);

impl<T: Real> Schedule<T> for ConstantSchedule<T> {
    fn hamiltonian(&self, _t: T) -> Result<Operator<T>> {
        Ok(self.0.clone())
    }
    fn derivative(&self, _t: T) -> Result<Operator<T>> {
        Ok(Operator::zeros(self.0.dim()))
    }
}

/// `H(t) = H_0 + s(t) (H_1 - H_0)` with `s` rising linearly on `[t0, t1]`.
#[derive(Clone, Debug)]
pub struct LinearRamp<T: Real> {
    pub start: Operator<T>,
    pub end: Operator<T>,
    pub t0: T,
    pub t1: T,
}

impl<T: Real> Schedule<T> for LinearRamp<T> {
    fn hamiltonian(&self, t: T) -> Result<Operator<T>> {
        let s = fmin(T::one(), fmax(T::zero(), (t - self.t0) / (self.t1 - self.t0)));
        Ok(&self.start + &(&self.end - &self.start).scale(s))
    }
    fn derivative(&self, t: T) -> Result<Operator<T>> {
        if t < self.t0 || t > self.t1 {
            return Ok(Operator::zeros(self.start.dim()));
        }
        Ok((&self.end - &self.start).scale(T::one() / (self.t1 - self.t0)))
    }
}

/// Schedule from closures.
pub struct FnSchedule<F, G> {
    pub h: F,
    pub dh: Option<G>,
}

impl<T, F, G> Schedule<T> for FnSchedule<F, G>
where
    T: Real,
    F: Fn(T) -> Result<Operator<T>> + Sync,
    G: Fn(T) -> Result<Operator<T>> + Sync,
{
    fn hamiltonian(&self, t: T) -> Result<Operator<T>> {
        (self.h)(t)
    }
    fn derivative(&self, t: T) -> Result<Operator<T>> {
        match &self.dh {
            Some(g) => g(t),
            None => {
                let h = T::of(1e-5) * fmax(T::one(), t.abs());
                let a = (self.h)(t + h)?;
                let b = (self.h)(t - h)?;
                Ok((&a - &b).scale(T::one() / (h + h)))
            }
        }
    }
}

pub(crate) fn ledger_row<T: Real>(
    gen: &GklsGenerator<T>,
    hdot: Option<&Operator<T>>,
    rho: &DensityMatrix<T>,
    t: T,
) -> Result<LedgerRow<T>> {
    let heat = gen.heat_currents(rho.matrix());
    let dh = hdot.map(|d| rho.expectation(d)).unwrap_or(T::zero());
    Ok(LedgerRow {
        t,
        energy: rho.expectation(gen.hamiltonian()),
        power: -dh,
        entropy: von_neumann_entropy(rho),
        sigma: entropy_production_rate(gen, rho)?,
        heat,
        energy_rate: dh + energy_rate_superop(gen, rho.matrix()),
    })
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if grid[0] < T::zero() {
        return Err(Error::NegativeTime(grid[0].to_f64_lossy()));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("time grid must be non-decreasing".into()));
    }
    Ok(())
}

/// Propagates `rho0` (given at `t = 0`) under a static generator and records
/// the ledger at every grid time.
pub fn trajectory<T: Real>(gen: &GklsGenerator<T>, rho0: &DensityMatrix<T>, grid: &[T]) -> Result<ThermoLedger<T>> {
    check_grid(grid)?;
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), found: rho0.dim() });
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let mut rho = rho0.clone();
    let mut prev_t = T::zero();
    let mut cached: Option<(T, Superoperator<T>)> = None;
    for &t in grid {
        let dt = t - prev_t;
        if dt > T::zero() {
            let reuse = matches!(&cached, Some((h, _)) if (*h - dt).abs() <= T::of(1e-14) * dt);
            if !reuse {
                cached = Some((dt, propagator(gen.liouvillian(), dt)?));
            }
            rho = cached.as_ref().expect("cached propagator").1.apply_state(&rho)?;
        }
        rows.push(ledger_row(gen, None, &rho, t)?);
        states.push(rho.clone());
        prev_t = t;
    }
    let max_gibbs_residual = gen.gibbs_residual().ok();
    Ok(ThermoLedger {
        bath_labels: gen.baths().iter().map(|b| b.label.clone()).collect(),
        rows,
        states,
        warnings: Vec::new(),
        max_gibbs_residual,
    })
}

/// Options for [`adiabatic_propagate`].
#[derive(Clone, Copy, Debug)]
pub struct AdiabaticOptions<T: Real> {
    /// Upper bound on the internal step.
    pub max_step: T,
    /// Internal steps per shortest Bohr period.
    pub steps_per_period: usize,
}

impl<T: Real> Default for AdiabaticOptions<T> {
    fn default() -> Self {
        Self { max_step: T::of(0.01), steps_per_period: 10 }
    }
}

/// Slowly driven open system: the Davies generator of the instantaneous
/// `H(t)` is rebuilt at every internal step (exponential midpoint rule).
/// `rho0` is the state at `grid[0]`.
pub fn adiabatic_propagate<T: Real, S: Schedule<T> + ?Sized>(
    schedule: &S,
    couplings: &[Coupling<T>],
    rho0: &DensityMatrix<T>,
    grid: &[T],
    options: AdiabaticOptions<T>,
) -> Result<ThermoLedger<T>> {
    check_grid(grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let mut warnings = Vec::new();
    let mut rho = rho0.clone();
    let mut gibbs = T::zero();
    let mut refined = 0usize;
    for (i, &t) in grid.iter().enumerate() {
        if i > 0 {
            let t_prev = grid[i - 1];
            let span = t - t_prev;
            if span > T::zero() {
                let h_mid = schedule.hamiltonian(t_prev + span / T::of(2.0))?;
                let ev = crate::opcore::eig_hermitian(&h_mid)?.values;
                let wmax = ev[ev.len() - 1] - ev[0];
                let mut hmax = options.max_step;
                if wmax > T::zero() {
                    hmax = fmin(hmax, T::two_pi() / (wmax * T::of(options.steps_per_period as f64)));
                }
                let n = (span / hmax).ceil().to_f64_lossy().max(1.0) as usize;
                if n > 1 {
                    refined += 1;
                }
                let h = span / T::of(n as f64);
                for s in 0..n {
                    let tm = t_prev + h * (T::of(s as f64) + T::of(0.5));
                    let g = build_davies(&schedule.hamiltonian(tm)?, couplings)?;
                    rho = propagator(g.liouvillian(), h)?.apply_state(&rho)?;
                }
            }
        }
        let g = build_davies(&schedule.hamiltonian(t)?, couplings)?;
        gibbs = fmax(gibbs, g.gibbs_residual()?);
        let hdot = schedule.derivative(t)?;
        rows.push(ledger_row(&g, Some(&hdot), &rho, t)?);
        states.push(rho.clone());
    }
    if refined > 0 {
        warnings.push(format!("{refined} output intervals were refined into internal substeps"));
    }
    let labels = {
        let mut v: Vec<String> = Vec::new();
        for c in couplings {
            if !v.iter().any(|l| l == c.bath.label()) {
                v.push(c.bath.label().to_string());
            }
        }
        v
    };
    Ok(ThermoLedger { bath_labels: labels, rows, states, warnings, max_gibbs_residual: Some(gibbs) })
}
