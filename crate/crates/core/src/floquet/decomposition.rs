use nalgebra::Schur;

use crate::error::{Error, Result};
use crate::gkls::Schedule;
use crate::opcore::{unitary_propagator, OpKind, Operator};
use crate::scalar::{c, cr, max_abs, CMatrix, Real, C};
use crate::tol;

/// Time-periodic Hamiltonian.
pub trait PeriodicSchedule<T: Real>: Schedule<T> {
    fn period(&self) -> T;
}

/// Qubit driven by a field rotating in the x-y plane:
/// `H(t) = (w0/2) sz + (eps/2)(cos(W t + phi) sx + sin(W t + phi) sy)`.
#[derive(Clone, Copy, Debug)]
pub struct CircularDrive<T: Real> {
    pub omega0: T,
    pub amplitude: T,
    pub drive_frequency: T,
    pub phase: T,
}

impl<T: Real> Schedule<T> for CircularDrive<T> {
    fn hamiltonian(&self, t: T) -> Result<Operator<T>> {
        let a = self.drive_frequency * t + self.phase;
        let half = T::of(0.5);
        let h = &(&Operator::pauli_z().scale(half * self.omega0) + &Operator::pauli_x().scale(half * self.amplitude * a.cos()))
            + &Operator::pauli_y().scale(half * self.amplitude * a.sin());
        Ok(h)
    }
    fn derivative(&self, t: T) -> Result<Operator<T>> {
        let a = self.drive_frequency * t + self.phase;
        let k = T::of(0.5) * self.amplitude * self.drive_frequency;
        Ok(&Operator::pauli_x().scale(-k * a.sin()) + &Operator::pauli_y().scale(k * a.cos()))
    }
}

impl<T: Real> PeriodicSchedule<T> for CircularDrive<T> {
    fn period(&self) -> T {
        T::two_pi() / self.drive_frequency
    }
}

/// `H(t) = H_0 + V cos(W t + phi)`.
#[derive(Clone, Debug)]
pub struct HarmonicDrive<T: Real> {
    pub h0: Operator<T>,
    pub v: Operator<T>,
    pub drive_frequency: T,
    pub phase: T,
}

impl<T: Real> Schedule<T> for HarmonicDrive<T> {
    fn hamiltonian(&self, t: T) -> Result<Operator<T>> {
        Ok(&self.h0 + &self.v.scale((self.drive_frequency * t + self.phase).cos()))
    }
    fn derivative(&self, t: T) -> Result<Operator<T>> {
        Ok(self.v.scale(-self.drive_frequency * (self.drive_frequency * t + self.phase).sin()))
    }
}

impl<T: Real> PeriodicSchedule<T> for HarmonicDrive<T> {
    fn period(&self) -> T {
        T::two_pi() / self.drive_frequency
    }
}

/// One fourth-order Magnus step `U(t + h, t)` (two Gauss nodes).
pub(crate) fn magnus4_step<T: Real, S: Schedule<T> + ?Sized>(s: &S, t: T, h: T) -> Result<CMatrix<T>> {
    let r = T::of(3.0f64.sqrt() / 6.0);
    let half = T::of(0.5);
    let h1 = s.hamiltonian(t + (half - r) * h)?;
    let h2 = s.hamiltonian(t + (half + r) * h)?;
    // i * Omega = h/2 (H1 + H2) - i sqrt(3)/12 h^2 [H2, H1]
    let comm = h2.matrix() * h1.matrix() - h1.matrix() * h2.matrix();
    let k = (h1.matrix() + h2.matrix()) * cr(half * h) + comm * c(T::zero(), -T::of(3.0f64.sqrt() / 12.0) * h * h);
    let kop = Operator::hermitian(k).map_err(|e| Error::Numerical(format!("Magnus exponent: {e}")))?;
    Ok(unitary_propagator(&kop, T::one())?.into_matrix())
}

/// Time-ordered propagator over `[t0, t0 + span]` in `n` Magnus steps.
pub(crate) fn magnus_propagator<T: Real, S: Schedule<T> + ?Sized>(s: &S, t0: T, span: T, n: usize) -> Result<CMatrix<T>> {
    let d = s.hamiltonian(t0)?.dim();
    let mut u = CMatrix::identity(d, d);
    if span == T::zero() {
        return Ok(u);
    }
    let h = span / T::of(n as f64);
    for k in 0..n {
        u = magnus4_step(s, t0 + h * T::of(k as f64), h)? * u;
    }
    Ok(u)
}

/// Floquet decomposition `U(t) = U_p(t) exp(-i H_av t)` with `U_p` periodic.
#[derive(Clone, Debug)]
pub struct FloquetDecomposition<T: Real> {
    pub period: T,
    /// Drive angular frequency `2 pi / period`.
    pub omega: T,
    /// Averaged Hamiltonian, quasi-energies in `(-omega/2, omega/2]`.
    pub h_av: Operator<T>,
    /// Quasi-energies, ascending.
    pub quasienergies: Vec<T>,
    /// Eigenvectors of `h_av` as columns, ordered like `quasienergies`.
    pub basis: CMatrix<T>,
    pub monodromy: Operator<T>,
    /// Sample times `k period / N`, `k = 0..=N`.
    pub times: Vec<T>,
    /// `U(t_k)`.
    pub propagators: Vec<CMatrix<T>>,
    /// `U_p(t_k) = U(t_k) exp(i H_av t_k)`.
    pub periodic: Vec<CMatrix<T>>,
    substeps: usize,
}

/// Integrates one period on `grid_points` uniform intervals and extracts the
/// averaged Hamiltonian from the principal logarithm of the monodromy.
pub fn floquet_decompose<T: Real, S: PeriodicSchedule<T> + ?Sized>(s: &S, grid_points: usize) -> Result<FloquetDecomposition<T>> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter("Floquet grid needs at least two intervals".into()));
    }
    let tau = s.period();
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidParameter("period must be positive and finite".into()));
    }
    let omega = T::two_pi() / tau;
    let n = grid_points;
    let substeps = 2048usize.div_ceil(n).max(4);
    let dt = tau / T::of(n as f64);
    let d = s.hamiltonian(T::zero())?.dim();
    let mut times = Vec::with_capacity(n + 1);
    let mut props = Vec::with_capacity(n + 1);
    let mut u = CMatrix::<T>::identity(d, d);
    times.push(T::zero());
    props.push(u.clone());
    for k in 0..n {
        let t0 = dt * T::of(k as f64);
        u = magnus_propagator(s, t0, dt, substeps)? * u;
        times.push(dt * T::of((k + 1) as f64));
        props.push(u.clone());
    }
    let mono = u;
    let schur = Schur::try_new(mono.clone(), T::epsilon(), 0).ok_or_else(|| Error::Numerical("Schur decomposition failed".into()))?;
    let (q, tri) = schur.unpack();
    let mut off = T::zero();
    for i in 0..d {
        for j in i + 1..d {
            off = crate::scalar::fmax(off, tri[(i, j)].norm_sqr().sqrt());
        }
    }
    if off > T::tol(tol::ALGEBRAIC) {
        return Err(Error::Numerical(format!("monodromy Schur form not diagonal ({:.3e})", off.to_f64_lossy())));
    }
    let mut eps: Vec<(T, usize)> = Vec::with_capacity(d);
    for j in 0..d {
        let z = tri[(j, j)];
        let phase = z.im.atan2(z.re);
        if T::pi() - phase.abs() < T::of(tol::BRANCH_CUT) {
            return Err(Error::BranchAmbiguity { phase: phase.to_f64_lossy() });
        }
        eps.push((-phase / tau, j));
    }
    eps.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite quasi-energies"));
    let quasienergies: Vec<T> = eps.iter().map(|e| e.0).collect();
    let basis = CMatrix::from_fn(d, d, |i, j| q[(i, eps[j].1)]);
    let mut scaled = basis.clone();
    for j in 0..d {
        for i in 0..d {
            scaled[(i, j)] *= cr(quasienergies[j]);
        }
    }
    let h_av = Operator::hermitian(&scaled * basis.adjoint())?;
    let periodic = times
        .iter()
        .zip(props.iter())
        .map(|(&t, u)| {
            let mut ph = basis.clone();
            for j in 0..d {
                let a = quasienergies[j] * t;
                for i in 0..d {
                    ph[(i, j)] *= C::new(a.cos(), a.sin());
                }
            }
            u * (&ph * basis.adjoint())
        })
        .collect();
    Ok(FloquetDecomposition {
        period: tau,
        omega,
        h_av,
        quasienergies,
        basis,
        monodromy: Operator::with_kind(mono, OpKind::Unitary),
        times,
        propagators: props,
        periodic,
        substeps,
    })
}

impl<T: Real> FloquetDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.h_av.dim()
    }

    /// Number of uniform sampling intervals per period.
    pub fn grid_points(&self) -> usize {
        self.times.len() - 1
    }

    /// `max |U(tau) - exp(-i H_av tau)|`.
    pub fn monodromy_residual(&self) -> Result<T> {
        let e = unitary_propagator(&self.h_av, self.period)?;
        Ok(max_abs(&(self.monodromy.matrix() - e.matrix())))
    }

    /// `max |U_p(tau) - I|`.
    pub fn periodicity_residual(&self) -> T {
        let d = self.dim();
        max_abs(&(self.periodic[self.periodic.len() - 1].clone() - CMatrix::<T>::identity(d, d)))
    }

    /// `U(t)` for any `t >= 0`, re-integrating from the nearest earlier sample.
    pub fn propagator_at<S: Schedule<T> + ?Sized>(&self, s: &S, t: T) -> Result<CMatrix<T>> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.to_f64_lossy()));
        }
        let cycles = (t / self.period).floor();
        let rem = t - cycles * self.period;
        let dt = self.period / T::of(self.grid_points() as f64);
        let k = ((rem / dt).floor().to_f64_lossy() as usize).min(self.grid_points() - 1);
        let span = rem - self.times[k];
        let steps = ((span / dt * T::of(self.substeps as f64)).ceil().to_f64_lossy() as usize).max(1);
        let partial = magnus_propagator(s, self.times[k], span, steps)? * &self.propagators[k];
        let mut mono_pow = CMatrix::<T>::identity(self.dim(), self.dim());
        for _ in 0..(cycles.to_f64_lossy() as usize) {
            mono_pow = self.monodromy.matrix() * mono_pow;
        }
        Ok(partial * mono_pow)
    }

    /// `U_p(t) = U(t) exp(i H_av t)`.
    pub fn periodic_part_at<S: Schedule<T> + ?Sized>(&self, s: &S, t: T) -> Result<CMatrix<T>> {
        let u = self.propagator_at(s, t)?;
        let back = unitary_propagator(&self.h_av, -t)?;
        Ok(u * back.matrix())
    }
}
