use super::medium::WorkingMedium;
use crate::baths::BathSpec;
use crate::error::{Error, Result};
use crate::floquet::magnus_propagator;
use crate::gkls::{build_davies, Coupling, Schedule};
use crate::opcore::{cp_check, eig_hermitian, propagator, Operator, Superoperator};
use crate::scalar::{c, CMatrix, Real};

/// Polar projection `U (U^dagger U)^{-1/2}`; removes the unitarity drift of
/// long step products.
fn nearest_unitary<T: Real>(u: &CMatrix<T>) -> Result<CMatrix<T>> {
    let g = Operator::hermitian(u.adjoint() * u)?;
    Ok(u * eig_hermitian(&g)?.map(|x| T::one() / x.sqrt()))
}

/// How an adiabat changes the energy scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// Ideal transport: instantaneous eigenstates map onto each other,
    /// populations are frozen.
    Adiabatic,
    /// `omega` ramped linearly in time, integrated exactly.
    LinearRamp,
    /// The state is unchanged while `H` jumps.
    Sudden,
}

/// Which end of the cycle a stroke refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Hot,
    Cold,
}

/// Declarative stroke of a reciprocating cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrokeSpec<T: Real> {
    /// Thermalization at fixed `H(omega_side)` with that side's bath.
    Isochore { side: Side, duration: T },
    /// Isolated change of the energy scale.
    Adiabat { from: Side, to: Side, duration: T, protocol: Protocol },
    /// Energy-basis dephasing at `H(omega_side)`; coherences between distinct
    /// levels are multiplied by `exp(-strength)`.
    Dephase { side: Side, strength: T },
}

impl<T: Real> StrokeSpec<T> {
    pub fn duration(&self) -> T {
        match *self {
            StrokeSpec::Isochore { duration, .. } | StrokeSpec::Adiabat { duration, .. } => duration,
            StrokeSpec::Dephase { .. } => T::zero(),
        }
    }
}

/// Energy bookkeeping attached to a stroke.
#[derive(Clone, Debug, PartialEq)]
pub enum StrokeKind<T: Real> {
    /// Heat stroke; bath `k` exchanges `Tr(H_k (rho_out - rho_in))` for each
    /// `(k, H_k)` listed.
    Heat { parts: Vec<(usize, Operator<T>)> },
    /// Isolated stroke; the energy change is work.
    Work,
    /// Energy-conserving stroke without a thermal bath.
    Dephase,
}

/// Stroke propagator with the Hamiltonians before and after it.
#[derive(Clone, Debug)]
pub struct Stroke<T: Real> {
    pub label: String,
    pub kind: StrokeKind<T>,
    pub map: Superoperator<T>,
    pub h_in: Operator<T>,
    pub h_out: Operator<T>,
    pub duration: T,
}

impl<T: Real> Stroke<T> {
    /// Checks complete positivity of the stroke map.
    pub fn check_cp(&self) -> Result<T> {
        let (ok, min) = cp_check(&self.map);
        if ok {
            Ok(min)
        } else {
            Err(Error::StrokeNotCp { stroke: self.label.clone(), min_eig: min.to_f64_lossy() })
        }
    }
}

/// `omega(t)` linear between two scales.
struct Ramp<'a, T: Real> {
    medium: &'a WorkingMedium<T>,
    from: T,
    to: T,
    duration: T,
}

impl<T: Real> Schedule<T> for Ramp<'_, T> {
    fn hamiltonian(&self, t: T) -> Result<Operator<T>> {
        Ok(self.medium.hamiltonian(self.from + (self.to - self.from) * t / self.duration))
    }
}

/// `sum_i |e_i(to)><e_i(from)|`, eigenvectors paired by energy order with
/// a real non-negative overlap.
pub fn adiabatic_transport<T: Real>(h_from: &Operator<T>, h_to: &Operator<T>) -> Result<Operator<T>> {
    let a = eig_hermitian(h_from)?;
    let b = eig_hermitian(h_to)?;
    let d = h_from.dim();
    let mut v = CMatrix::<T>::zeros(d, d);
    for i in 0..d {
        let ea = a.vectors.column(i);
        let eb = b.vectors.column(i);
        let ov = eb.dotc(&ea);
        let mag = ov.norm_sqr().sqrt();
        let ph = if mag > T::zero() { ov / c(mag, T::zero()) } else { c(T::one(), T::zero()) };
        v += (eb * ph) * ea.adjoint();
    }
    Operator::unitary(v)
}

/// Energy-basis dephasing map for `h`.
pub fn dephasing_map<T: Real>(h: &Operator<T>, strength: T) -> Result<Superoperator<T>> {
    if !(strength >= T::zero()) {
        return Err(Error::InvalidParameter("dephasing strength must be non-negative".into()));
    }
    let eig = eig_hermitian(h)?;
    let levels = eig.levels(T::of(crate::tol::BOHR_MERGE));
    let projectors: Vec<CMatrix<T>> = levels.iter().map(|l| eig.projector(l.indices.clone())).collect();
    let f = (-strength).exp();
    let d = h.dim();
    let mut s = Superoperator::zeros(d);
    for (i, pi) in projectors.iter().enumerate() {
        for (j, pj) in projectors.iter().enumerate() {
            let w = if i == j { T::one() } else { f };
            s = &s + &Superoperator::sandwich(pi, pj).scale(w);
        }
    }
    Ok(s)
}

/// Builds the propagator of one stroke. `omega` gives the scale of each
/// side, `baths[0]` is hot and `baths[1]` cold.
pub fn build_stroke<T: Real>(
    medium: &WorkingMedium<T>,
    omega: [T; 2],
    baths: &[BathSpec<T>; 2],
    spec: &StrokeSpec<T>,
    label: &str,
) -> Result<Stroke<T>> {
    let idx = |s: Side| match s {
        Side::Hot => 0,
        Side::Cold => 1,
    };
    let d = medium.dim();
    let stroke = match *spec {
        StrokeSpec::Isochore { side, duration } => {
            check_duration(duration)?;
            let k = idx(side);
            let h = medium.hamiltonian(omega[k]);
            let gen = build_davies(&h, &[Coupling::new(medium.coupling(), baths[k].clone())])?;
            Stroke {
                label: label.to_string(),
                kind: StrokeKind::Heat { parts: vec![(k, h.clone())] },
                map: propagator(gen.liouvillian(), duration)?,
                h_in: h.clone(),
                h_out: h,
                duration,
            }
        }
        StrokeSpec::Adiabat { from, to, duration, protocol } => {
            check_duration(duration)?;
            let (w0, w1) = (omega[idx(from)], omega[idx(to)]);
            let h_in = medium.hamiltonian(w0);
            let h_out = medium.hamiltonian(w1);
            let map = match protocol {
                Protocol::Adiabatic => Superoperator::unitary_conjugation(&adiabatic_transport(&h_in, &h_out)?),
                Protocol::Sudden => Superoperator::identity(d),
                Protocol::LinearRamp => {
                    if duration == T::zero() {
                        Superoperator::identity(d)
                    } else {
                        let ramp = Ramp { medium, from: w0, to: w1, duration };
                        let steps = ((duration * (w0.abs() + w1.abs()) * T::of(50.0)).ceil().to_f64_lossy() as usize).max(64);
                        let u = magnus_propagator(&ramp, T::zero(), duration, steps)?;
                        Superoperator::unitary_conjugation(&Operator::unitary(nearest_unitary(&u)?)?)
                    }
                }
            };
            Stroke { label: label.to_string(), kind: StrokeKind::Work, map, h_in, h_out, duration }
        }
        StrokeSpec::Dephase { side, strength } => {
            let h = medium.hamiltonian(omega[idx(side)]);
            Stroke {
                label: label.to_string(),
                kind: StrokeKind::Dephase,
                map: dephasing_map(&h, strength)?,
                h_in: h.clone(),
                h_out: h,
                duration: T::zero(),
            }
        }
    };
    stroke.check_cp()?;
    Ok(stroke)
}

fn check_duration<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter("stroke durations must be finite and non-negative".into()));
    }
    Ok(())
}
