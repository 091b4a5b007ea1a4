use rand::Rng;

use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, embed, Operator};
use crate::random::seeded;
use crate::scalar::{cr, CVector, Real};

/// Open-boundary Heisenberg chain `sum_i sigma_i · sigma_{i+1} + sum_i h_i sigma^z_i`
/// with fields `h_i` drawn uniformly from `[-w/2, w/2]`.
pub fn heisenberg_chain<T: Real>(n: usize, field_width: f64, seed: u64) -> Result<Operator<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter("chain needs at least two spins".into()));
    }
    let dims = vec![2usize; n];
    let d = 1usize << n;
    let mut h = Operator::<T>::zeros(d);
    let paulis = [Operator::<T>::pauli_x(), Operator::<T>::pauli_y(), Operator::<T>::pauli_z()];
    for i in 0..n - 1 {
        for p in &paulis {
            let a = embed(p, i, &dims)?;
            let b = embed(p, i + 1, &dims)?;
            h = &h + &(&a * &b);
        }
    }
    let mut rng = seeded(seed);
    for i in 0..n {
        let hi: f64 = if field_width > 0.0 { rng.random_range(-field_width / 2.0..field_width / 2.0) } else { 0.0 };
        h = &h + &embed(&paulis[2], i, &dims)?.scale(T::of(hi));
    }
    Operator::hermitian(h.into_matrix())
}

/// Néel product state `|0101...>` (site 0 in `sigma^z = +1`).
pub fn neel_state<T: Real>(n: usize) -> CVector<T> {
    let d = 1usize << n;
    let mut idx = 0usize;
    for site in 0..n {
        idx = (idx << 1) | (site % 2);
    }
    let mut v = CVector::zeros(d);
    v[idx] = cr(T::one());
    v
}

/// Diagonal-ensemble versus microcanonical averages of an observable.
#[derive(Clone, Debug)]
pub struct EthComparison<T: Real> {
    pub energy: T,
    pub diagonal_average: T,
    pub microcanonical_average: T,
    pub gap: T,
    pub window_states: usize,
    /// Spectral range of the observable.
    pub observable_range: T,
}

/// Compares the infinite-time (diagonal ensemble) average of `a` from `psi`
/// with the microcanonical average over eigenstates in `|E_n - E| <= width/2`.
pub fn diagonal_vs_microcanonical<T: Real>(
    h: &Operator<T>,
    psi: &CVector<T>,
    a: &Operator<T>,
    width: T,
) -> Result<EthComparison<T>> {
    let eig = eig_hermitian(h)?;
    let coeffs = eig.vectors.adjoint() * psi;
    let ae = eig.to_eigenbasis(a.matrix());
    let d = eig.dim();
    let energy = (0..d).fold(T::zero(), |s, k| s + coeffs[k].norm_sqr() * eig.values[k]);
    let diag = (0..d).fold(T::zero(), |s, k| s + coeffs[k].norm_sqr() * ae[(k, k)].re);
    let idx: Vec<usize> = (0..d).filter(|&k| (eig.values[k] - energy).abs() <= width / T::of(2.0)).collect();
    if idx.is_empty() {
        return Err(Error::EmptyWindow { energy: energy.to_f64_lossy(), width: width.to_f64_lossy() });
    }
    let micro = idx.iter().fold(T::zero(), |s, &k| s + ae[(k, k)].re) / T::of(idx.len() as f64);
    let av = eig_hermitian(a)?.values;
    Ok(EthComparison {
        energy,
        diagonal_average: diag,
        microcanonical_average: micro,
        gap: (diag - micro).abs(),
        window_states: idx.len(),
        observable_range: av[av.len() - 1] - av[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_as_observable_is_trivial() {
        let h = heisenberg_chain::<f64>(4, 1.0, 3).unwrap();
        let psi = neel_state::<f64>(4);
        let cmp = diagonal_vs_microcanonical(&h, &psi, &h, 2.0).unwrap();
        assert!((cmp.diagonal_average - cmp.energy).abs() < 1e-12);
        assert!(cmp.gap <= 1.0 + 1e-12);
    }

    #[test]
    fn neel_energy() {
        let n = 5;
        let h = heisenberg_chain::<f64>(n, 0.0, 0).unwrap();
        let psi = neel_state::<f64>(n);
        let e = (psi.adjoint() * h.matrix() * &psi)[(0, 0)].re;
        assert!((e + (n as f64 - 1.0)).abs() < 1e-12);
    }
}
