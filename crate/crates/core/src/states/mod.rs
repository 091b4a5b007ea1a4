//! Thermal states, entropies, passivity, correlation functions and
//! eigenstate-thermalization diagnostics.

mod correlation;
mod entropy;
mod eth;
mod passivity;
pub(crate) mod thermal;

pub use correlation::{correlation_amplitudes, correlation_function, kms_check, CorrelationLine};
pub use entropy::{log_regularized, mutual_information, relative_entropy, shannon_entropy_in_basis, von_neumann_entropy};
pub use eth::{diagonal_vs_microcanonical, heisenberg_chain, neel_state, EthComparison};
pub use passivity::{
    complete_passivity, ergotropy, is_passive, joint_spectrum, passive_spectrum, CompletePassivity, JointSpectrum,
    MAX_TENSOR_DIM,
};
pub use thermal::{dephase, free_energy, gibbs_state, log_partition_function, microcanonical_state, microcanonical_window};
