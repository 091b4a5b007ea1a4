use thiserror::Error;

/// Errors raised by the solvers. Residuals are reported in `f64` regardless of precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("operator is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("Kraus operators are not normalized (residual {residual:.3e})")]
    KrausNotNormalized { residual: f64 },
    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),
    #[error("operators do not commute (residual {0:.3e})")]
    NotCommuting(f64),
    #[error("no eigenvalue at or below energy {0}")]
    EnergyBelowSpectrum(f64),
    #[error("tensor power of dimension {base}^{n} exceeds the limit; largest feasible n is {max_n}")]
    DimensionOverflow { base: usize, n: usize, max_n: usize },
    #[error("empty microcanonical window around E = {energy} (width {width})")]
    EmptyWindow { energy: f64, width: f64 },
    #[error("bosonic occupation has a pole: energy {energy} not above chemical potential {mu}")]
    BosePole { energy: f64, mu: f64 },
    #[error("frequency {0} is outside the spectral domain")]
    OutOfDomain(f64),
    #[error("Bohr frequencies {a} and {b} are closer than the resolution threshold")]
    UnresolvedBohrGaps { a: f64, b: f64 },
    #[error("harmonic lines from different averaged frequencies coincide at {0}")]
    CoincidentHarmonics(f64),
    #[error("null space has dimension {0}; no unique solution")]
    DegenerateNullSpace(usize),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("monodromy eigenphase {phase} lies on the logarithm branch cut; shift the driving phase or period")]
    BranchAmbiguity { phase: f64 },
    #[error("harmonic tail weight {tail:.3e} exceeds tolerance with q_max = {q_max}")]
    HarmonicTail { tail: f64, q_max: usize },
    #[error("stroke '{stroke}' is not completely positive (min Choi eigenvalue {min_eig:.3e})")]
    StrokeNotCp { stroke: String, min_eig: f64 },
    #[error("unit eigenspace of the cycle propagator has multiplicity {0}")]
    DegenerateLimitCycle(usize),
    #[error("resonance condition violated: omega_w = {omega_w}, omega_h - omega_c = {expected}")]
    OffResonance { omega_w: f64, expected: f64 },
    #[error("bath '{0}' has no temperature attached")]
    MissingTemperature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
