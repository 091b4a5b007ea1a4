//! Seeded random operators and states (ChaCha8 streams).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::opcore::{eigh, DensityMatrix, Operator};
use crate::scalar::{c, cr, CMatrix, CVector, Real};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(T::of(re * std::f64::consts::FRAC_1_SQRT_2), T::of(im * std::f64::consts::FRAC_1_SQRT_2))
    })
}

/// Hermitian matrix from the Gaussian unitary ensemble.
pub fn random_hermitian<T: Real>(d: usize, rng: &mut SeededRng) -> Operator<T> {
    let g = ginibre::<T>(d, d, rng);
    Operator::hermitian_unchecked((&g + g.adjoint()) * cr(T::of(0.5)))
}

/// Haar-random unitary (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<T: Real>(d: usize, rng: &mut SeededRng) -> Operator<T> {
    let g = ginibre::<T>(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let n = z.norm_sqr().sqrt();
        if n > T::zero() {
            let ph = z / cr(n);
            for i in 0..d {
                q[(i, j)] *= ph;
            }
        }
    }
    Operator::unitary(q).expect("QR factor is unitary")
}

/// Random normalized state vector.
pub fn random_pure<T: Real>(d: usize, rng: &mut SeededRng) -> CVector<T> {
    let g = ginibre::<T>(d, 1, rng);
    let n = g.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    CVector::from_iterator(d, g.iter().map(|z| *z / cr(n)))
}

/// Full-rank random state `G G^dagger / Tr(G G^dagger)`.
pub fn random_density<T: Real>(d: usize, rng: &mut SeededRng) -> DensityMatrix<T> {
    let g = ginibre::<T>(d, d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::unchecked(m * cr(T::one() / tr))
}

/// Kraus set with `sum W W^dagger = I`.
pub fn random_kraus<T: Real>(d: usize, k: usize, rng: &mut SeededRng) -> Vec<Operator<T>> {
    let raw: Vec<CMatrix<T>> = (0..k).map(|_| ginibre::<T>(d, d, rng)).collect();
    let mut s = CMatrix::<T>::zeros(d, d);
    for a in &raw {
        s += a * a.adjoint();
    }
    let inv_sqrt = eigh(&s).map(|x| T::one() / x.sqrt());
    raw.into_iter()
        .map(|a| Operator::general(&inv_sqrt * a).expect("finite"))
        .collect()
}

/// Uniform sample in `[lo, hi)`.
pub fn uniform<T: Real>(lo: f64, hi: f64, rng: &mut SeededRng) -> T {
    T::of(rng.random_range(lo..hi))
}
