use super::linalg::{eigh, SpectralDecomposition};
use super::operator::{hermitian_residual, hermitize, Operator};
use crate::error::{Error, Result};
use crate::scalar::{all_finite, cr, fmax, max_abs, CMatrix, CVector, Real};
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    mat: CMatrix<T>,
}

fn validate<T: Real>(mat: &CMatrix<T>, herm_tol: T, tol: T) -> Result<()> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
    }
    if !all_finite(mat) {
        return Err(Error::NonFinite);
    }
    let res = hermitian_residual(mat);
    if res > herm_tol * fmax(T::one(), max_abs(mat)) {
        return Err(Error::InvalidState(format!("hermitian residual {:.3e}", res.to_f64_lossy())));
    }
    let tr = mat.trace().re;
    if (tr - T::one()).abs() > tol {
        return Err(Error::InvalidState(format!("trace {}", tr.to_f64_lossy())));
    }
    let min = eigh(mat).values[0];
    if min < -tol {
        return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", min.to_f64_lossy())));
    }
    Ok(())
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity (structural), unit trace and positivity (algebraic).
    pub fn new(mat: CMatrix<T>) -> Result<Self> {
        validate(&mat, T::tol(tol::STRUCTURAL), T::tol(tol::ALGEBRAIC))?;
        Ok(Self { mat: hermitize(&mat) })
    }

    /// Accepts propagated states, allowing dynamical-tolerance drift.
    pub fn from_dynamics(mat: CMatrix<T>) -> Result<Self> {
        validate(&mat, T::tol(tol::DYNAMICAL), T::tol(tol::DYNAMICAL))?;
        Ok(Self { mat: hermitize(&mat) })
    }

    pub(crate) fn unchecked(mat: CMatrix<T>) -> Self {
        Self { mat: hermitize(&mat) }
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &CVector<T>) -> Result<Self> {
        let n = psi.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        if (n - T::one()).abs() > T::tol(tol::ALGEBRAIC) {
            return Err(Error::InvalidState(format!("state vector norm^2 {}", n.to_f64_lossy())));
        }
        Ok(Self { mat: psi * psi.adjoint() })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: CMatrix::identity(d, d) * cr(T::one() / T::of(d as f64)) }
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut mat = CMatrix::zeros(d, d);
        mat[(k, k)] = cr(T::one());
        Self { mat }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(p: &[T]) -> Result<Self> {
        let d = p.len();
        let mut mat = CMatrix::zeros(d, d);
        for (k, &v) in p.iter().enumerate() {
            mat[(k, k)] = cr(v);
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.mat
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    pub fn purity(&self) -> T {
        (&self.mat * &self.mat).trace().re
    }

    /// `Tr(A rho)`; the real part for hermitian `A`.
    pub fn expectation(&self, a: &Operator<T>) -> T {
        a.trace_with(&self.mat).re
    }

    pub fn spectrum(&self) -> SpectralDecomposition<T> {
        eigh(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.spectrum().values
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// `U rho U^dagger`.
    pub fn evolve_unitary(&self, u: &Operator<T>) -> Self {
        Self { mat: u.matrix() * &self.mat * u.matrix().adjoint() }
    }

    /// `(1/2) ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &Self) -> T {
        let diff = &self.mat - &other.mat;
        eigh(&diff).values.iter().fold(T::zero(), |a, &b| a + b.abs()) * T::of(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn rejects_bad_trace_and_negativity() {
        assert!(DensityMatrix::<f64>::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::<f64>::diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::<f64>::diagonal(&[0.3, 0.7]).is_ok());
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let s = 0.5f64.sqrt();
        let psi = CVector::from_vec(vec![c(s, 0.0), c(0.0, s)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((rho.trace_distance(&mixed) - 0.5).abs() < 1e-15);
    }
}
