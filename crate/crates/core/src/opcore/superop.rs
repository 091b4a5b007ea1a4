use std::ops::{Add, Mul, Sub};

use super::density::DensityMatrix;
use super::linalg::{eigh, kron, matexp, SquareMatrix};
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::scalar::{all_finite, c, cr, max_abs, CMatrix, CVector, Real};
use crate::tol;

/// Linear map on `d x d` matrices acting on column-stacked vectors:
/// `vec(A X B) = (B^T ⊗ A) vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    mat: CMatrix<T>,
    dim: usize,
}

/// Column-stacking vectorization.
pub fn vec<T: Real>(x: &CMatrix<T>) -> CVector<T> {
    CVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec<T: Real>(v: &CVector<T>, d: usize) -> CMatrix<T> {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Row functional `r` with `r · vec(X) = Tr(A X)`.
pub fn trace_functional<T: Real>(a: &CMatrix<T>) -> CVector<T> {
    vec(&a.transpose())
}

impl<T: Real> Superoperator<T> {
    pub fn from_matrix(mat: CMatrix<T>) -> Result<Self> {
        let n = mat.nrows();
        if n != mat.ncols() {
            return Err(Error::NotSquare { rows: n, cols: mat.ncols() });
        }
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n {
            return Err(Error::InvalidParameter(format!("superoperator size {n} is not a square")));
        }
        if !all_finite(&mat) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mat, dim })
    }

    pub(crate) fn raw(mat: CMatrix<T>, dim: usize) -> Self {
        Self { mat, dim }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: CMatrix::identity(d * d, d * d), dim: d }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: CMatrix::zeros(d * d, d * d), dim: d }
    }

    /// `X -> A X B`.
    pub fn sandwich(a: &CMatrix<T>, b: &CMatrix<T>) -> Self {
        Self { mat: kron(&b.transpose(), a), dim: a.nrows() }
    }

    /// `X -> A X`.
    pub fn left(a: &CMatrix<T>) -> Self {
        let d = a.nrows();
        Self::sandwich(a, &CMatrix::identity(d, d))
    }

    /// `X -> X B`.
    pub fn right(b: &CMatrix<T>) -> Self {
        let d = b.nrows();
        Self::sandwich(&CMatrix::identity(d, d), b)
    }

    /// `X -> -i [H, X]`.
    pub fn hamiltonian(h: &Operator<T>) -> Self {
        let l = Self::left(h.matrix());
        let r = Self::right(h.matrix());
        Self { mat: (l.mat - r.mat) * c(T::zero(), -T::one()), dim: h.dim() }
    }

    /// `X -> U X U^dagger`.
    pub fn unitary_conjugation(u: &Operator<T>) -> Self {
        Self::sandwich(u.matrix(), &u.matrix().adjoint())
    }

    /// `X -> gamma (V X V^dagger - {V^dagger V, X}/2)`.
    pub fn dissipator(v: &CMatrix<T>, gamma: T) -> Self {
        let d = v.nrows();
        let vdv = v.adjoint() * v;
        let id = CMatrix::<T>::identity(d, d);
        let half = cr(T::of(0.5));
        let m = kron(&v.conjugate(), v) - kron(&id, &vdv) * half - kron(&vdv.transpose(), &id) * half;
        Self { mat: m * cr(gamma), dim: d }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.mat
    }

    pub fn apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        unvec(&(&self.mat * vec(x)), self.dim)
    }

    /// Applies the map to a state, validating the output at dynamical tolerance.
    pub fn apply_state(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        DensityMatrix::from_dynamics(self.apply(rho.matrix()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { mat: &self.mat * &other.mat, dim: self.dim }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { mat: &self.mat * cr(s), dim: self.dim }
    }

    /// Largest deviation of `Tr(S(X)) = Tr(X)` over matrix units.
    pub fn trace_defect(&self) -> T {
        self.trace_functional_residual(true)
    }

    /// Largest deviation of `Tr(L(X)) = 0` over matrix units (generators).
    pub fn generator_trace_defect(&self) -> T {
        self.trace_functional_residual(false)
    }

    fn trace_functional_residual(&self, map: bool) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for col in 0..d * d {
            let mut s = cr(T::zero());
            for i in 0..d {
                s += self.mat[(i + i * d, col)];
            }
            let diag = col % d == col / d;
            if map && diag {
                s -= cr(T::one());
            }
            let v = s.norm_sqr().sqrt();
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    /// Choi matrix `C[(i,a),(j,b)] = S(|i><j|)[a,b]`.
    pub fn to_choi(&self) -> CMatrix<T> {
        let d = self.dim;
        CMatrix::from_fn(d * d, d * d, |r, s| {
            let (i, a) = (r / d, r % d);
            let (j, b) = (s / d, s % d);
            self.mat[(a + b * d, i + j * d)]
        })
    }

    /// Smallest eigenvalue of the (hermitized) Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> T {
        eigh(&self.to_choi()).values[0]
    }

    /// Whether the map is hermiticity preserving (Choi matrix hermitian).
    pub fn hermiticity_residual(&self) -> T {
        let ch = self.to_choi();
        max_abs(&(&ch - ch.adjoint()))
    }
}

/// Complete-positivity verdict and the smallest Choi eigenvalue.
pub fn cp_check<T: Real>(s: &Superoperator<T>) -> (bool, T) {
    let min = s.choi_min_eigenvalue();
    (min >= -T::tol(tol::DYNAMICAL), min)
}

/// Superoperator from a Choi matrix (inverse of [`Superoperator::to_choi`]).
pub fn from_choi<T: Real>(choi: &CMatrix<T>) -> Result<Superoperator<T>> {
    let n = choi.nrows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || choi.ncols() != n {
        return Err(Error::InvalidParameter("Choi matrix size is not a square".into()));
    }
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let (i, a) = (r / d, r % d);
            let (j, b) = (s / d, s % d);
            m[(a + b * d, i + j * d)] = choi[(r, s)];
        }
    }
    Ok(Superoperator::raw(m, d))
}

impl<T: Real> SquareMatrix<T> for Superoperator<T> {
    fn as_matrix(&self) -> &CMatrix<T> {
        &self.mat
    }
    fn from_exponential(&self, m: CMatrix<T>) -> Self {
        Self { mat: m, dim: self.dim }
    }
}

impl<'a, T: Real> Add<&'a Superoperator<T>> for &'a Superoperator<T> {
    type Output = Superoperator<T>;
    fn add(self, rhs: &'a Superoperator<T>) -> Superoperator<T> {
        Superoperator { mat: &self.mat + &rhs.mat, dim: self.dim }
    }
}

impl<'a, T: Real> Sub<&'a Superoperator<T>> for &'a Superoperator<T> {
    type Output = Superoperator<T>;
    fn sub(self, rhs: &'a Superoperator<T>) -> Superoperator<T> {
        Superoperator { mat: &self.mat - &rhs.mat, dim: self.dim }
    }
}

impl<'a, T: Real> Mul<&'a Superoperator<T>> for &'a Superoperator<T> {
    type Output = Superoperator<T>;
    fn mul(self, rhs: &'a Superoperator<T>) -> Superoperator<T> {
        self.compose(rhs)
    }
}

/// `exp(t L)` for a generator.
pub fn propagator<T: Real>(l: &Superoperator<T>, t: T) -> Result<Superoperator<T>> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    matexp(l, t)
}

/// Map in Kraus form `rho -> sum_mu W_mu^dagger rho W_mu` with
/// `sum_mu W_mu W_mu^dagger = I`.
#[derive(Clone, Debug)]
pub struct KrausMap<T: Real> {
    ops: Vec<Operator<T>>,
}

impl<T: Real> KrausMap<T> {
    pub fn new(ops: Vec<Operator<T>>) -> Result<Self> {
        let d = ops.first().map(|o| o.dim()).ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
        let mut sum = CMatrix::<T>::zeros(d, d);
        for w in &ops {
            if w.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: w.dim() });
            }
            sum += w.matrix() * w.matrix().adjoint();
        }
        let res = max_abs(&(sum - CMatrix::identity(d, d)));
        if res > T::tol(tol::ALGEBRAIC) {
            return Err(Error::KrausNotNormalized { residual: res.to_f64_lossy() });
        }
        Ok(Self { ops })
    }

    pub fn operators(&self) -> &[Operator<T>] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for w in &self.ops {
            out += w.matrix().adjoint() * rho * w.matrix();
        }
        out
    }

    pub fn to_superoperator(&self) -> Superoperator<T> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for w in &self.ops {
            m += Superoperator::sandwich(&w.matrix().adjoint(), w.matrix()).mat;
        }
        Superoperator::raw(m, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::linalg::unitary_propagator;
    use crate::random::{random_density, random_hermitian, random_unitary, seeded};
    use proptest::prelude::*;

    #[test]
    fn identity_choi_is_maximally_entangled_projector() {
        let d = 3;
        let ch = Superoperator::<f64>::identity(d).to_choi();
        // d P_Omega = sum_{ij} |ii><jj|
        let mut expect = CMatrix::<f64>::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                expect[(i * d + i, j * d + j)] = cr(1.0);
            }
        }
        assert!(max_abs(&(ch - expect)) < 1e-15);
    }

    #[test]
    fn transpose_is_positive_but_not_cp() {
        let d = 2;
        let mut m = CMatrix::<f64>::zeros(4, 4);
        for i in 0..d {
            for j in 0..d {
                m[(j + i * d, i + j * d)] = cr(1.0);
            }
        }
        let t = Superoperator::from_matrix(m).unwrap();
        let (ok, min) = cp_check(&t);
        assert!(!ok);
        assert!((min + 1.0).abs() < 1e-14);
    }

    #[test]
    fn kraus_rejects_unnormalized() {
        let w = Operator::<f64>::identity(2).scale(1.1);
        assert!(matches!(KrausMap::new(vec![w]), Err(Error::KrausNotNormalized { .. })));
    }

    #[test]
    fn unitary_propagation_matches_superoperator() {
        let mut rng = seeded(9);
        let h = random_hermitian::<f64>(3, &mut rng);
        let rho = random_density::<f64>(3, &mut rng);
        let u = unitary_propagator(&h, 1.3).unwrap();
        let l = Superoperator::hamiltonian(&h);
        let p = propagator(&l, 1.3).unwrap();
        let a = p.apply(rho.matrix());
        let b = u.matrix() * rho.matrix() * u.matrix().adjoint();
        assert!(max_abs(&(a - b)) < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        let l = Superoperator::<f64>::zeros(2);
        assert!(matches!(propagator(&l, -1.0), Err(Error::NegativeTime(_))));
    }

    proptest! {
        #[test]
        fn sandwich_matches_vec_identity(seed in 0u64..1000, d in 1usize..5) {
            let mut rng = seeded(seed);
            let a = random_hermitian::<f64>(d, &mut rng);
            let b = random_unitary::<f64>(d, &mut rng);
            let x = random_hermitian::<f64>(d, &mut rng);
            let s = Superoperator::sandwich(a.matrix(), b.matrix());
            let direct = a.matrix() * x.matrix() * b.matrix();
            prop_assert!(max_abs(&(s.apply(x.matrix()) - direct)) < 1e-12);
        }

        #[test]
        fn choi_roundtrip(seed in 0u64..1000, d in 1usize..4) {
            let mut rng = seeded(seed);
            let u = random_unitary::<f64>(d, &mut rng);
            let s = Superoperator::unitary_conjugation(&u);
            let back = from_choi(&s.to_choi()).unwrap();
            prop_assert!(max_abs(&(back.matrix() - s.matrix())) < 1e-14);
        }

        #[test]
        fn kraus_maps_are_cp_and_unital_dual(seed in 0u64..1000, d in 2usize..4, k in 1usize..4) {
            let mut rng = seeded(seed);
            let ops = crate::random::random_kraus::<f64>(d, k, &mut rng);
            let map = KrausMap::new(ops).unwrap();
            let s = map.to_superoperator();
            let (ok, _) = cp_check(&s);
            prop_assert!(ok);
            prop_assert!(s.trace_defect() < 1e-10);
            let rho = random_density::<f64>(d, &mut rng);
            prop_assert!(max_abs(&(map.apply(rho.matrix()) - s.apply(rho.matrix()))) < 1e-12);
        }
    }
}
