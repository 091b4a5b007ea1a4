//! Default tolerance table (f64 values; f32 runs scale them by `Real::TOL_SCALE`).

/// Hermiticity, trace and tagging checks.
pub const STRUCTURAL: f64 = 1e-12;
/// Identities that hold exactly in exact arithmetic (Choi positivity, Kraus sums).
pub const ALGEBRAIC: f64 = 1e-10;
/// Conservation laws along propagated trajectories.
pub const DYNAMICAL: f64 = 1e-9;
/// Eigenvalue floor used in matrix logarithms.
pub const LOG_FLOOR: f64 = 1e-14;
/// Relative gap (to the spectral range) under which Bohr frequencies are merged.
pub const BOHR_MERGE: f64 = 1e-9;
/// Relative gap under which two distinct Bohr frequencies are considered unresolved.
pub const BOHR_RESOLVE: f64 = 1e-6;
/// Relative singular-value threshold for null spaces.
pub const NULL_SPACE: f64 = 1e-12;
/// Accepted relative weight of truncated Floquet harmonics.
pub const HARMONIC_TAIL: f64 = 1e-6;
/// Distance of a monodromy eigenphase from the branch cut that triggers rejection.
pub const BRANCH_CUT: f64 = 1e-9;
