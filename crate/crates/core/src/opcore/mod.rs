//! Operators, density matrices, superoperators and the linear algebra
//! underneath them.

mod density;
mod linalg;
mod operator;
mod superop;

pub use density::DensityMatrix;
pub use linalg::{
    eig_hermitian, embed, group_levels, kron, matexp, null_space, partial_trace, singular_values, spectral_norm,
    tensor, tensor_all, unitary_propagator, Level, SpectralDecomposition, SquareMatrix,
};
pub(crate) use linalg::eigh;
pub use operator::{hermitian_residual, OpKind, Operator};
pub use superop::{cp_check, from_choi, propagator, trace_functional, unvec, vec, KrausMap, Superoperator};
