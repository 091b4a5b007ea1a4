//! Periodically driven open systems: Floquet decomposition, harmonic
//! channels, the Floquet-Markov generator and its heat currents.

mod channels;
mod decomposition;
#[cfg(test)]
mod tests;

pub use channels::{
    build_floquet_generator, channel_heat, classify_regime, floquet_heat_currents, harmonic_decompose, limit_cycle, limit_cycle_csv,
    reconstruction_residual, FloquetChannel, FloquetCurrents, FloquetGenerator, Harmonic, Regime,
};
pub use decomposition::{floquet_decompose, CircularDrive, FloquetDecomposition, HarmonicDrive, PeriodicSchedule};
pub(crate) use decomposition::magnus_propagator;
