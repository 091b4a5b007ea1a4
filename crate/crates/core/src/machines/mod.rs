//! Quantum heat machines: reciprocating cycles assembled from stroke
//! propagators, their limit cycles and figures of merit, and the continuous
//! three-mode absorption refrigerator.

mod cycle;
mod friction;
mod medium;
mod optimize;
mod stroke;
mod tricycle;
mod trotter;

pub use cycle::{
    compose_cycle, cycle_energetics, find_limit_cycle, run_cycle, run_otto, swap_engine, Cycle, CycleEnergetics,
    CycleReport, CycleRow, CycleSpec, FixedPointMethod, LimitCycle, MachineKind, OttoDurations, StrokeEnergy,
};
pub use friction::{quantum_friction, QuantumFriction};
pub use medium::WorkingMedium;
pub use optimize::{
    apply_parameters, nelder_mead_unit_box, optimize_power, Bound, FreeParameter, OptimizerOptions, PowerOptimum,
    SimplexResult,
};
pub use stroke::{adiabatic_transport, build_stroke, dephasing_map, Protocol, Side, Stroke, StrokeKind, StrokeSpec};
pub use tricycle::{
    build_tricycle, gain, third_law_sweep, tricycle_steady, FilterCoupling, SweepPolicy, SweepRow, ThirdLawSweep,
    TricycleRepresentation, TricycleSpec, TricycleSteady, DEFAULT_EPSILON,
};
pub use trotter::{fit_slope, sudden_generators, sudden_limit_check, trotter_table, TrotterRow, TrotterTable, ASYMPTOTIC_LIMIT, ROUNDOFF_FLOOR};
