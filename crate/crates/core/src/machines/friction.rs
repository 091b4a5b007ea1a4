use super::cycle::{compose_cycle, cycle_energetics, find_limit_cycle, CycleSpec};
use super::stroke::{adiabatic_transport, Protocol, StrokeKind};
use crate::error::{Error, Result};
use crate::opcore::Superoperator;
use crate::scalar::{fmax, Real};
use crate::states::{is_passive, shannon_entropy_in_basis, von_neumann_entropy};

/// Cost of non-adiabatic driving at the limit cycle of a cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumFriction<T: Real> {
    /// Extra work spent on the adiabats relative to ideal transport from the
    /// same input states. Non-negative for passive inputs.
    pub coherence_work: T,
    /// Largest `S_H - S_vn` at the end of an adiabat.
    pub entropy_gap: T,
    /// Work extracted per cycle under the given protocol.
    pub cycle_work: T,
    /// Work extracted per cycle with every adiabat made ideal.
    pub cycle_work_adiabatic: T,
    /// Every adiabat starts from a passive state. Only then is
    /// `coherence_work >= 0` guaranteed.
    pub passive_inputs: bool,
}

/// Compares each adiabat of `spec` at its limit cycle with ideal transport
/// started from the same state.
pub fn quantum_friction<T: Real>(spec: &CycleSpec<T>) -> Result<QuantumFriction<T>> {
    let cycle = compose_cycle(spec)?;
    let lc = find_limit_cycle(&cycle.map, None, 0)?;
    let e = cycle_energetics(&cycle, &lc.state)?;
    let mut coherence_work = T::zero();
    let mut entropy_gap = T::zero();
    let mut passive_inputs = true;
    let mut rho = lc.state.clone();
    for (k, s) in cycle.strokes.iter().enumerate() {
        let out = &e.states[k];
        if matches!(s.kind, StrokeKind::Work) {
            passive_inputs &= match is_passive(&rho, &s.h_in) {
                Ok(p) => p,
                Err(Error::NotCommuting(_)) => false,
                Err(e) => return Err(e),
            };
            let ideal = Superoperator::unitary_conjugation(&adiabatic_transport(&s.h_in, &s.h_out)?).apply_state(&rho)?;
            let w_ideal = rho.expectation(&s.h_in) - ideal.expectation(&s.h_out);
            coherence_work += w_ideal - e.strokes[k].work;
            entropy_gap = fmax(entropy_gap, shannon_entropy_in_basis(out, &s.h_out)? - von_neumann_entropy(out));
        }
        rho = out.clone();
    }
    let ideal_spec = spec.clone().with_protocol(Protocol::Adiabatic);
    let ideal_cycle = compose_cycle(&ideal_spec)?;
    let ideal_lc = find_limit_cycle(&ideal_cycle.map, None, 0)?;
    let cycle_work_adiabatic = cycle_energetics(&ideal_cycle, &ideal_lc.state)?.work;
    Ok(QuantumFriction { coherence_work, entropy_gap, cycle_work: e.work, cycle_work_adiabatic, passive_inputs })
}
