use crate::opcore::Operator;
use crate::scalar::Real;

/// Working medium of a reciprocating machine, parametrised by the energy
/// scale `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WorkingMedium<T: Real> {
    /// `H = omega S_z + J S_x` with `S = sigma / 2`, coupled through `sigma_x`.
    Qubit { transverse: T },
    /// `H = omega (n + 1/2)` on the lowest `levels` Fock states, coupled
    /// through `a + a^dagger`.
    Oscillator { levels: usize },
}

impl<T: Real> WorkingMedium<T> {
    pub fn qubit() -> Self {
        WorkingMedium::Qubit { transverse: T::zero() }
    }

    pub fn dim(&self) -> usize {
        match *self {
            WorkingMedium::Qubit { .. } => 2,
            WorkingMedium::Oscillator { levels } => levels,
        }
    }

    pub fn hamiltonian(&self, omega: T) -> Operator<T> {
        let half = T::of(0.5);
        match *self {
            WorkingMedium::Qubit { transverse } => {
                &Operator::pauli_z().scale(half * omega) + &Operator::pauli_x().scale(half * transverse)
            }
            WorkingMedium::Oscillator { levels } => {
                let e: Vec<T> = (0..levels).map(|n| omega * (T::of(n as f64) + half)).collect();
                Operator::diagonal(&e)
            }
        }
    }

    pub fn coupling(&self) -> Operator<T> {
        match *self {
            WorkingMedium::Qubit { .. } => Operator::pauli_x(),
            WorkingMedium::Oscillator { levels } => {
                let a = Operator::annihilation(levels);
                Operator::hermitian((&a + &a.adjoint()).into_matrix()).expect("a + a^dagger is hermitian")
            }
        }
    }

    /// Whether `H(omega)` and `H(omega')` commute for all scales.
    pub fn is_commuting_family(&self) -> bool {
        match *self {
            WorkingMedium::Qubit { transverse } => transverse == T::zero(),
            WorkingMedium::Oscillator { .. } => true,
        }
    }
}
