use std::fmt::Write as _;

use super::medium::WorkingMedium;
use super::stroke::{build_stroke, Protocol, Side, Stroke, StrokeKind, StrokeSpec};
use crate::baths::BathSpec;
use crate::error::{Error, Result};
use crate::gkls::{build_davies, fmt_sig, Coupling};
use crate::opcore::{null_space, tensor, unvec, DensityMatrix, Operator, Superoperator};
use crate::scalar::{cr, fmax, max_abs, CMatrix, Real};
use crate::states::relative_entropy;
use crate::tol;

/// Direction of operation; it fixes the stroke labels and which figure of
/// merit is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineKind {
    Engine,
    Refrigerator,
}

/// Reciprocating cycle between a hot and a cold bath.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleSpec<T: Real> {
    pub medium: WorkingMedium<T>,
    pub omega_h: T,
    pub omega_c: T,
    pub hot: BathSpec<T>,
    pub cold: BathSpec<T>,
    /// Strokes in the order they are applied.
    pub strokes: Vec<StrokeSpec<T>>,
    pub machine: MachineKind,
}

/// Durations of the four Otto strokes, in time order starting from the hot isochore.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OttoDurations<T: Real> {
    pub hot: T,
    pub expansion: T,
    pub cold: T,
    pub compression: T,
}

impl<T: Real> OttoDurations<T> {
    pub fn uniform(t: T) -> Self {
        Self { hot: t, expansion: t, cold: t, compression: t }
    }
}

impl<T: Real> CycleSpec<T> {
    /// Four-stroke Otto engine `U_ch U_c U_hc U_h`.
    pub fn otto(
        medium: WorkingMedium<T>,
        omega_h: T,
        omega_c: T,
        hot: BathSpec<T>,
        cold: BathSpec<T>,
        durations: OttoDurations<T>,
        protocol: Protocol,
    ) -> Self {
        let strokes = vec![
            StrokeSpec::Isochore { side: Side::Hot, duration: durations.hot },
            StrokeSpec::Adiabat { from: Side::Hot, to: Side::Cold, duration: durations.expansion, protocol },
            StrokeSpec::Isochore { side: Side::Cold, duration: durations.cold },
            StrokeSpec::Adiabat { from: Side::Cold, to: Side::Hot, duration: durations.compression, protocol },
        ];
        Self { medium, omega_h, omega_c, hot, cold, strokes, machine: MachineKind::Engine }
    }

    /// Reversed Otto cycle `U_hc U_c U_ch U_h`. Read backwards, the engine
    /// compression becomes the expansion that follows the hot isochore, so
    /// the scale sequence is the same as for the engine.
    pub fn otto_refrigerator(
        medium: WorkingMedium<T>,
        omega_h: T,
        omega_c: T,
        hot: BathSpec<T>,
        cold: BathSpec<T>,
        durations: OttoDurations<T>,
        protocol: Protocol,
    ) -> Self {
        let mut s = Self::otto(medium, omega_h, omega_c, hot, cold, durations, protocol);
        s.machine = MachineKind::Refrigerator;
        s
    }

    /// Inserts an energy-basis dephasing stroke after every adiabat.
    pub fn with_dephasing_after_adiabats(mut self, strength: T) -> Self {
        let mut out = Vec::with_capacity(self.strokes.len() + 2);
        for s in self.strokes {
            out.push(s);
            if let StrokeSpec::Adiabat { to, .. } = s {
                out.push(StrokeSpec::Dephase { side: to, strength });
            }
        }
        self.strokes = out;
        self
    }

    /// Replaces the protocol of every adiabat.
    pub fn with_protocol(mut self, protocol: Protocol) -> Self {
        for s in &mut self.strokes {
            if let StrokeSpec::Adiabat { protocol: p, .. } = s {
                *p = protocol;
            }
        }
        self
    }

    pub fn cycle_time(&self) -> T {
        self.strokes.iter().fold(T::zero(), |a, s| a + s.duration())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > T::zero()) || !(self.omega_h > self.omega_c) || !self.omega_h.is_finite() {
            return Err(Error::InvalidParameter("frequencies must satisfy omega_h > omega_c > 0".into()));
        }
        if self.strokes.is_empty() {
            return Err(Error::InvalidParameter("cycle has no strokes".into()));
        }
        Ok(())
    }

    fn label(&self, s: &StrokeSpec<T>) -> String {
        let side = |x: Side| if x == Side::Hot { "h" } else { "c" };
        match *s {
            StrokeSpec::Isochore { side: x, .. } => side(x).to_string(),
            StrokeSpec::Adiabat { from, to, .. } => match self.machine {
                MachineKind::Engine => format!("{}{}", side(from), side(to)),
                MachineKind::Refrigerator => format!("{}{}", side(to), side(from)),
            },
            StrokeSpec::Dephase { side: x, .. } => format!("dephase_{}", side(x)),
        }
    }
}

/// Composed cycle propagator with its strokes.
#[derive(Clone, Debug)]
pub struct Cycle<T: Real> {
    pub strokes: Vec<Stroke<T>>,
    /// Product of the stroke maps, last stroke leftmost.
    pub map: Superoperator<T>,
    pub bath_labels: Vec<String>,
    pub betas: Vec<T>,
    pub machine: MachineKind,
    /// `max |[U_2, U_1]|` for the first two strokes.
    pub noncommutation: T,
    /// Smallest Choi eigenvalue over strokes and the cycle map.
    pub min_choi: T,
}

impl<T: Real> Cycle<T> {
    /// Composes strokes given in time order.
    pub fn from_strokes(strokes: Vec<Stroke<T>>, bath_labels: Vec<String>, betas: Vec<T>, machine: MachineKind) -> Result<Self> {
        let first = strokes.first().ok_or_else(|| Error::InvalidParameter("cycle has no strokes".into()))?;
        let d = first.map.dim();
        let mut map = Superoperator::identity(d);
        let mut min_choi = T::infinity();
        for s in &strokes {
            if s.map.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.map.dim() });
            }
            min_choi = crate::scalar::fmin(min_choi, s.check_cp()?);
            map = s.map.compose(&map);
        }
        min_choi = crate::scalar::fmin(min_choi, map.choi_min_eigenvalue());
        let noncommutation = if strokes.len() > 1 {
            let (a, b) = (strokes[1].map.matrix(), strokes[0].map.matrix());
            max_abs(&(a * b - b * a))
        } else {
            T::zero()
        };
        Ok(Self { strokes, map, bath_labels, betas, machine, noncommutation, min_choi })
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn cycle_time(&self) -> T {
        self.strokes.iter().fold(T::zero(), |a, s| a + s.duration)
    }
}

/// Builds every stroke of `spec`, checks complete positivity and multiplies
/// them in time order.
pub fn compose_cycle<T: Real>(spec: &CycleSpec<T>) -> Result<Cycle<T>> {
    spec.validate()?;
    let baths = [spec.hot.clone(), spec.cold.clone()];
    let omega = [spec.omega_h, spec.omega_c];
    let strokes = spec
        .strokes
        .iter()
        .map(|s| build_stroke(&spec.medium, omega, &baths, s, &spec.label(s)))
        .collect::<Result<Vec<_>>>()?;
    Cycle::from_strokes(
        strokes,
        vec![spec.hot.label().to_string(), spec.cold.label().to_string()],
        vec![spec.hot.beta(), spec.cold.beta()],
        spec.machine,
    )
}

/// How the fixed point was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPointMethod {
    NullSpace,
    PowerIteration,
}

/// Invariant state of a cycle propagator and the approach to it.
#[derive(Clone, Debug)]
pub struct LimitCycle<T: Real> {
    pub state: DensityMatrix<T>,
    /// `S(rho_n | rho_lc)` for the iterates `rho_n = U^n rho_start`.
    pub convergence: Vec<T>,
    /// Whether `convergence` is non-increasing within the dynamical tolerance.
    pub monotone: bool,
    pub method: FixedPointMethod,
}

const POWER_ITERATION_CAP: usize = 100_000;

/// Fixed point of a CPTP cycle map. The iterates start from `start`
/// (maximally mixed if `None`) and `iterations` of them are recorded.
pub fn find_limit_cycle<T: Real>(
    u: &Superoperator<T>,
    start: Option<&DensityMatrix<T>>,
    iterations: usize,
) -> Result<LimitCycle<T>> {
    let d = u.dim();
    let n = d * d;
    let shifted = u.matrix() - CMatrix::<T>::identity(n, n);
    let ns = null_space(&shifted, T::of(tol::NULL_SPACE))?;
    let (state, method) = match ns.len() {
        1 => {
            let m = unvec(&ns[0], d);
            let tr = m.trace();
            let m = m / tr;
            let h = (&m + m.adjoint()) * cr(T::of(0.5));
            (DensityMatrix::from_dynamics(h)?, FixedPointMethod::NullSpace)
        }
        0 => (power_iteration(u)?, FixedPointMethod::PowerIteration),
        k => return Err(Error::DegenerateLimitCycle(k)),
    };
    let mut rho = match start {
        Some(s) => {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
            }
            s.clone()
        }
        None => DensityMatrix::maximally_mixed(d),
    };
    let mut convergence = Vec::with_capacity(iterations + 1);
    convergence.push(relative_entropy(&rho, &state)?);
    for _ in 0..iterations {
        rho = u.apply_state(&rho)?;
        convergence.push(relative_entropy(&rho, &state)?);
    }
    let slack = T::tol(tol::DYNAMICAL);
    let monotone = convergence.windows(2).all(|w| !(w[1] > w[0] + slack));
    Ok(LimitCycle { state, convergence, monotone, method })
}

fn power_iteration<T: Real>(u: &Superoperator<T>) -> Result<DensityMatrix<T>> {
    let d = u.dim();
    let mut rho = DensityMatrix::<T>::maximally_mixed(d).into_matrix();
    for _ in 0..POWER_ITERATION_CAP {
        let next = u.apply(&rho);
        let delta = max_abs(&(&next - &rho));
        rho = next;
        if delta <= T::tol(tol::STRUCTURAL) {
            let h = (&rho + rho.adjoint()) * cr(T::of(0.5));
            return DensityMatrix::from_dynamics(h);
        }
    }
    Err(Error::Numerical("power iteration on the cycle map did not converge".into()))
}

/// Energy exchanged in one stroke.
#[derive(Clone, Debug, PartialEq)]
pub struct StrokeEnergy<T: Real> {
    pub label: String,
    /// Heat from each bath into the medium.
    pub heat: Vec<T>,
    /// Work extracted from the medium.
    pub work: T,
}

/// Stroke-resolved energetics of one pass through the cycle.
#[derive(Clone, Debug)]
pub struct CycleEnergetics<T: Real> {
    pub strokes: Vec<StrokeEnergy<T>>,
    pub work: T,
    pub heat: Vec<T>,
    /// Energy change in strokes that are neither heat nor work.
    pub other: T,
    /// States after each stroke.
    pub states: Vec<DensityMatrix<T>>,
}

/// Propagates `rho` once around the cycle, accumulating heat and work.
pub fn cycle_energetics<T: Real>(cycle: &Cycle<T>, rho: &DensityMatrix<T>) -> Result<CycleEnergetics<T>> {
    let nb = cycle.betas.len();
    let mut cur = rho.clone();
    let mut strokes = Vec::with_capacity(cycle.strokes.len());
    let mut states = Vec::with_capacity(cycle.strokes.len());
    let mut heat = vec![T::zero(); nb];
    let mut work = T::zero();
    let mut other = T::zero();
    for s in &cycle.strokes {
        let next = s.map.apply_state(&cur)?;
        let mut e = StrokeEnergy { label: s.label.clone(), heat: vec![T::zero(); nb], work: T::zero() };
        let de = next.expectation(&s.h_out) - cur.expectation(&s.h_in);
        match &s.kind {
            StrokeKind::Heat { parts } => {
                let diff = next.matrix() - cur.matrix();
                let mut accounted = T::zero();
                for (k, hk) in parts {
                    let q = hk.trace_with(&diff).re;
                    e.heat[*k] += q;
                    heat[*k] += q;
                    accounted += q;
                }
                other += de - accounted;
            }
            StrokeKind::Work => {
                e.work = -de;
                work -= de;
            }
            StrokeKind::Dephase => other += de,
        }
        strokes.push(e);
        states.push(next.clone());
        cur = next;
    }
    Ok(CycleEnergetics { strokes, work, heat, other, states })
}

/// One row of the cycle report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleRow<T: Real> {
    pub cycle_index: usize,
    pub work: T,
    pub q_h: T,
    pub q_c: T,
    pub eta: T,
    pub power: T,
    pub entropy_production: T,
}

/// Limit-cycle thermodynamics of a reciprocating machine.
#[derive(Clone, Debug)]
pub struct CycleReport<T: Real> {
    pub machine: MachineKind,
    pub strokes: Vec<StrokeEnergy<T>>,
    /// Work extracted per cycle.
    pub work: T,
    pub q_h: T,
    pub q_c: T,
    /// `W / Q_h` when the cycle runs as an engine.
    pub efficiency: Option<T>,
    /// `Q_c / (-W)` when the cycle cools.
    pub cop: Option<T>,
    pub carnot_efficiency: T,
    pub carnot_cop: T,
    pub cycle_time: T,
    pub power: T,
    /// `-sum_k beta_k Q_k` per cycle.
    pub entropy_production: T,
    /// `|W - Q_h - Q_c|` relative to the largest of the three.
    pub first_law_residual: T,
    pub limit_cycle: LimitCycle<T>,
    /// Iterates from the start state.
    pub rows: Vec<CycleRow<T>>,
    pub noncommutation: T,
    pub min_choi: T,
    pub warnings: Vec<String>,
}

impl<T: Real> CycleReport<T> {
    /// Engine efficiency bound `eta <= eta_c`, or the refrigerator bound
    /// `COP <= COP_c`, within `tol`.
    pub fn respects_carnot(&self, tol: T) -> bool {
        let eng = self.efficiency.map_or(true, |e| e <= self.carnot_efficiency + tol);
        let fr = self.cop.map_or(true, |c| c <= self.carnot_cop + tol);
        eng && fr
    }

    /// `cycle_index,W,Q_h,Q_c,eta,power,entropy_production`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cycle_index,W,Q_h,Q_c,eta,power,entropy_production\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.cycle_index,
                fmt_sig(r.work),
                fmt_sig(r.q_h),
                fmt_sig(r.q_c),
                fmt_sig(r.eta),
                fmt_sig(r.power),
                fmt_sig(r.entropy_production)
            );
        }
        s
    }
}

fn entropy_production<T: Real>(heat: &[T], betas: &[T]) -> T {
    heat.iter().zip(betas).fold(T::zero(), |a, (&q, &b)| if q == T::zero() { a } else { a - b * q })
}

fn efficiency<T: Real>(work: T, q_h: T) -> T {
    if work > T::zero() && q_h > T::zero() {
        work / q_h
    } else {
        T::zero() / T::zero()
    }
}

/// Runs `cycles` iterations from `start` (maximally mixed if `None`) and
/// evaluates the energetics at the limit cycle.
pub fn run_cycle<T: Real>(cycle: &Cycle<T>, cycles: usize, start: Option<&DensityMatrix<T>>) -> Result<CycleReport<T>> {
    if cycle.betas.len() != 2 {
        return Err(Error::InvalidParameter("cycle report needs a hot and a cold bath".into()));
    }
    let lc = find_limit_cycle(&cycle.map, start, cycles)?;
    let tau = cycle.cycle_time();
    let per_time = |w: T| if tau > T::zero() { w / tau } else { T::zero() / T::zero() };
    let mut rows = Vec::with_capacity(cycles);
    let mut rho = match start {
        Some(s) => s.clone(),
        None => DensityMatrix::maximally_mixed(cycle.dim()),
    };
    for i in 0..cycles {
        let e = cycle_energetics(cycle, &rho)?;
        rows.push(CycleRow {
            cycle_index: i + 1,
            work: e.work,
            q_h: e.heat[0],
            q_c: e.heat[1],
            eta: efficiency(e.work, e.heat[0]),
            power: per_time(e.work),
            entropy_production: entropy_production(&e.heat, &cycle.betas),
        });
        rho = e.states.last().expect("cycle has strokes").clone();
    }
    let e = cycle_energetics(cycle, &lc.state)?;
    let (work, q_h, q_c) = (e.work, e.heat[0], e.heat[1]);
    let scale = fmax(fmax(work.abs(), q_h.abs()), fmax(q_c.abs(), T::epsilon()));
    let first_law_residual = (work - q_h - q_c).abs() / scale;
    let (bh, bc) = (cycle.betas[0], cycle.betas[1]);
    let carnot_efficiency = T::one() - bh / bc;
    let carnot_cop = bh / (bc - bh);
    let tol = T::tol(tol::DYNAMICAL) * scale;
    let mut warnings = Vec::new();
    let efficiency = (work > tol && q_h > tol).then(|| work / q_h);
    let cop = (q_c > tol && work < -tol).then(|| q_c / -work);
    match cycle.machine {
        MachineKind::Engine if efficiency.is_none() => warnings.push("not an engine at these parameters".to_string()),
        MachineKind::Refrigerator if cop.is_none() => warnings.push("not a refrigerator at these parameters".to_string()),
        _ => {}
    }
    if !lc.monotone {
        warnings.push("relative entropy to the limit cycle increased between iterates".to_string());
    }
    Ok(CycleReport {
        machine: cycle.machine,
        strokes: e.strokes,
        work,
        q_h,
        q_c,
        efficiency,
        cop,
        carnot_efficiency,
        carnot_cop,
        cycle_time: tau,
        power: per_time(work),
        entropy_production: entropy_production(&e.heat, &cycle.betas),
        first_law_residual,
        limit_cycle: lc,
        rows,
        noncommutation: cycle.noncommutation,
        min_choi: cycle.min_choi,
        warnings,
    })
}

/// Composes `spec` and runs it for `cycles` iterations.
pub fn run_otto<T: Real>(spec: &CycleSpec<T>, cycles: usize) -> Result<CycleReport<T>> {
    run_cycle(&compose_cycle(spec)?, cycles, None)
}

/// Two-stroke engine on two qubits with gaps `omega_h` and `omega_c`:
/// a swap stroke followed by parallel thermalization of each qubit with its
/// own bath for `duration`.
pub fn swap_engine<T: Real>(omega_h: T, omega_c: T, hot: BathSpec<T>, cold: BathSpec<T>, duration: T) -> Result<Cycle<T>> {
    if !(omega_c > T::zero()) || !(omega_h > omega_c) {
        return Err(Error::InvalidParameter("frequencies must satisfy omega_h > omega_c > 0".into()));
    }
    let half = T::of(0.5);
    let id = Operator::identity(2);
    let hh = tensor(&Operator::pauli_z().scale(half * omega_h), &id);
    let hc = tensor(&id, &Operator::pauli_z().scale(half * omega_c));
    let h = &hh + &hc;
    let labels = vec![hot.label().to_string(), cold.label().to_string()];
    let betas = vec![hot.beta(), cold.beta()];
    let gen = build_davies(
        &h,
        &[Coupling::new(tensor(&Operator::pauli_x(), &id), hot), Coupling::new(tensor(&id, &Operator::pauli_x()), cold)],
    )?;
    let swap = Operator::unitary(CMatrix::from_fn(4, 4, |i, j| {
        let (a, b) = (j / 2, j % 2);
        if i == b * 2 + a {
            cr(T::one())
        } else {
            cr(T::zero())
        }
    }))?;
    let strokes = vec![
        Stroke {
            label: "swap".to_string(),
            kind: StrokeKind::Work,
            map: Superoperator::unitary_conjugation(&swap),
            h_in: h.clone(),
            h_out: h.clone(),
            duration: T::zero(),
        },
        Stroke {
            label: "thermalize".to_string(),
            kind: StrokeKind::Heat { parts: vec![(0, hh), (1, hc)] },
            map: crate::opcore::propagator(gen.liouvillian(), duration)?,
            h_in: h.clone(),
            h_out: h,
            duration,
        },
    ];
    Cycle::from_strokes(strokes, labels, betas, MachineKind::Engine)
}
