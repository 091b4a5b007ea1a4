//! GKLS generators: direct construction, the Davies weak-coupling
//! construction, propagation, stationary states and thermodynamic ledgers.

mod dynamics;
mod evolution;
mod generator;
mod ledger;

pub use dynamics::{entropy_production_explicit, entropy_production_rate, entropy_rate, propagate, stationary_state};
pub use evolution::{adiabatic_propagate, trajectory, AdiabaticOptions, ConstantSchedule, FnSchedule, LinearRamp, Schedule};
pub use generator::{build_davies, generator_gibbs, BathInfo, Construction, Coupling, GklsGenerator, Jump, JumpChannel};
pub use ledger::{fmt_sig, LedgerRow, ThermoLedger};
