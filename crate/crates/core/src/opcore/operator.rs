use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, c, cr, fmax, max_abs, CMatrix, Real, C};
use crate::tol;

/// Structural tag carried by an [`Operator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    General,
    Hermitian,
    Unitary,
}

/// Square complex matrix with a structural tag.
///
/// Hermitian and unitary tags are checked at construction and preserved by
/// the operations that keep them exact (sums of hermitian operators, real
/// scaling, products of unitaries, tensor products).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    mat: CMatrix<T>,
    kind: OpKind,
}

fn check_square<T: Real>(m: &CMatrix<T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Largest entry of `A - A^dagger`.
pub fn hermitian_residual<T: Real>(m: &CMatrix<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn hermitize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * cr(T::of(0.5))
}

impl<T: Real> Operator<T> {
    /// Untagged operator; rejects non-square or non-finite input.
    pub fn general(mat: CMatrix<T>) -> Result<Self> {
        check_square(&mat)?;
        Ok(Self { mat, kind: OpKind::General })
    }

    /// Hermitian operator. The residual `max|A - A^dagger|` must be below the
    /// structural tolerance relative to `max(1, max|A|)`; the stored matrix
    /// is the hermitian part.
    pub fn hermitian(mat: CMatrix<T>) -> Result<Self> {
        check_square(&mat)?;
        let res = hermitian_residual(&mat);
        let scale = fmax(T::one(), max_abs(&mat));
        if res > T::tol(tol::STRUCTURAL) * scale {
            return Err(Error::NotHermitian { residual: res.to_f64_lossy() });
        }
        Ok(Self { mat: hermitize(&mat), kind: OpKind::Hermitian })
    }

    /// Unitary operator, checked via `max|U^dagger U - I|`.
    pub fn unitary(mat: CMatrix<T>) -> Result<Self> {
        check_square(&mat)?;
        let d = mat.nrows();
        let res = max_abs(&(mat.adjoint() * &mat - CMatrix::<T>::identity(d, d)));
        if res > T::tol(tol::ALGEBRAIC) {
            return Err(Error::NotUnitary { residual: res.to_f64_lossy() });
        }
        Ok(Self { mat, kind: OpKind::Unitary })
    }

    pub(crate) fn with_kind(mat: CMatrix<T>, kind: OpKind) -> Self {
        Self { mat, kind }
    }

    pub(crate) fn hermitian_unchecked(mat: CMatrix<T>) -> Self {
        Self { mat: hermitize(&mat), kind: OpKind::Hermitian }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: CMatrix::identity(d, d), kind: OpKind::Hermitian }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: CMatrix::zeros(d, d), kind: OpKind::Hermitian }
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[T]) -> Self {
        let d = values.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, v) in values.iter().enumerate() {
            mat[(i, i)] = cr(*v);
        }
        Self { mat, kind: OpKind::Hermitian }
    }

    /// Builds a hermitian operator from real entries given row by row.
    pub fn from_real_rows(d: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: rows.len() });
        }
        Self::hermitian(DMatrix::from_fn(d, d, |i, j| cr(T::of(rows[i * d + j]))))
    }

    pub fn pauli_x() -> Self {
        let o = C::new(T::zero(), T::zero());
        let l = cr(T::one());
        Self::with_kind(DMatrix::from_row_slice(2, 2, &[o, l, l, o]), OpKind::Hermitian)
    }

    pub fn pauli_y() -> Self {
        let o = C::new(T::zero(), T::zero());
        let i = c(T::zero(), T::one());
        Self::with_kind(DMatrix::from_row_slice(2, 2, &[o, -i, i, o]), OpKind::Hermitian)
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[T::one(), -T::one()])
    }

    /// Lowering operator `|1><0|` in the basis where `sigma_z = diag(1, -1)`.
    pub fn sigma_minus() -> Self {
        let mut mat = CMatrix::zeros(2, 2);
        mat[(1, 0)] = cr(T::one());
        Self::with_kind(mat, OpKind::General)
    }

    pub fn sigma_plus() -> Self {
        Self::sigma_minus().adjoint()
    }

    /// Truncated bosonic annihilation operator on `d` Fock levels.
    pub fn annihilation(d: usize) -> Self {
        let mut mat = CMatrix::zeros(d, d);
        for n in 1..d {
            mat[(n - 1, n)] = cr(T::of(n as f64).sqrt());
        }
        Self::with_kind(mat, OpKind::General)
    }

    /// Number operator `diag(0, 1, ..., d-1)`.
    pub fn number(d: usize) -> Self {
        let v: Vec<T> = (0..d).map(|n| T::of(n as f64)).collect();
        Self::diagonal(&v)
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

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn is_hermitian(&self) -> bool {
        self.kind == OpKind::Hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint(), kind: self.kind }
    }

    pub fn trace(&self) -> C<T> {
        self.mat.trace()
    }

    /// `[A, B]`.
    pub fn commutator(&self, other: &Self) -> Self {
        let m = &self.mat * &other.mat - &other.mat * &self.mat;
        Self::with_kind(m, OpKind::General)
    }

    /// Largest entry of `[A, B]`.
    pub fn commutator_norm(&self, other: &Self) -> T {
        max_abs(self.commutator(other).matrix())
    }

    pub fn scale(&self, s: T) -> Self {
        let kind = if self.kind == OpKind::Hermitian { OpKind::Hermitian } else { OpKind::General };
        Self { mat: &self.mat * cr(s), kind }
    }

    pub fn scale_complex(&self, s: C<T>) -> Self {
        Self::with_kind(&self.mat * s, OpKind::General)
    }

    /// `Tr(A X)` for any square matrix `X`.
    pub fn trace_with(&self, x: &CMatrix<T>) -> C<T> {
        let d = self.dim();
        let mut acc = cr(T::zero());
        for i in 0..d {
            for j in 0..d {
                acc += self.mat[(i, j)] * x[(j, i)];
            }
        }
        acc
    }
}

fn sum_kind(a: OpKind, b: OpKind) -> OpKind {
    if a == OpKind::Hermitian && b == OpKind::Hermitian {
        OpKind::Hermitian
    } else {
        OpKind::General
    }
}

impl<'a, T: Real> Add<&'a Operator<T>> for &'a Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: &'a Operator<T>) -> Operator<T> {
        Operator { mat: &self.mat + &rhs.mat, kind: sum_kind(self.kind, rhs.kind) }
    }
}

impl<'a, T: Real> Sub<&'a Operator<T>> for &'a Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: &'a Operator<T>) -> Operator<T> {
        Operator { mat: &self.mat - &rhs.mat, kind: sum_kind(self.kind, rhs.kind) }
    }
}

impl<'a, T: Real> Mul<&'a Operator<T>> for &'a Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: &'a Operator<T>) -> Operator<T> {
        let kind = if self.kind == OpKind::Unitary && rhs.kind == OpKind::Unitary {
            OpKind::Unitary
        } else {
            OpKind::General
        };
        Operator { mat: &self.mat * &rhs.mat, kind }
    }
}

impl<T: Real> Neg for &Operator<T> {
    type Output = Operator<T>;
    fn neg(self) -> Operator<T> {
        let kind = if self.kind == OpKind::Hermitian { OpKind::Hermitian } else { OpKind::General };
        Operator { mat: -&self.mat, kind }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = Operator::<f64>::pauli_x();
        let y = Operator::<f64>::pauli_y();
        let z = Operator::<f64>::pauli_z();
        let xy = &x * &y;
        let iz = z.scale_complex(c(0.0, 1.0));
        assert!(max_abs(&(xy.matrix() - iz.matrix())) < 1e-15);
        let sp = Operator::<f64>::sigma_plus();
        let sm = Operator::<f64>::sigma_minus();
        assert!(max_abs(&((&sp + &sm).matrix() - x.matrix())) < 1e-15);
    }

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(Operator::<f64>::hermitian(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(1.0), cr(0.0), cr(1.0)]);
        assert!(matches!(Operator::<f64>::unitary(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn canonical_commutator_in_bulk() {
        let d = 6;
        let a = Operator::<f64>::annihilation(d);
        let ad = a.adjoint();
        let comm = a.commutator(&ad);
        for n in 0..d - 1 {
            assert!((comm.matrix()[(n, n)].re - 1.0).abs() < 1e-14);
        }
        let num = &ad * &a;
        assert!(max_abs(&(num.matrix() - Operator::<f64>::number(d).matrix())) < 1e-14);
    }

    #[test]
    fn nonsquare_and_nonfinite_rejected() {
        let m = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(Operator::general(m), Err(Error::NotSquare { .. })));
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = cr(f64::NAN);
        assert!(matches!(Operator::general(m), Err(Error::NonFinite)));
    }
}
