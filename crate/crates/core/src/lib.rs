//! Open-quantum-system thermodynamics: GKLS generators built from bath
//! correlation functions, thermodynamic bookkeeping, and quantum heat machines.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`);
//! the `*64` aliases below fix it to double precision.

pub mod baths;
pub mod error;
pub mod floquet;
pub mod gkls;
pub mod machines;
pub mod opcore;
pub mod random;
pub mod states;
pub mod scalar;
pub mod tol;

pub use error::{Error, Result};
pub use scalar::{CMatrix, CVector, Real, C};

pub type Operator64 = opcore::Operator<f64>;
pub type DensityMatrix64 = opcore::DensityMatrix<f64>;
pub type Superoperator64 = opcore::Superoperator<f64>;
pub type Operator32 = opcore::Operator<f32>;
pub type DensityMatrix32 = opcore::DensityMatrix<f32>;
