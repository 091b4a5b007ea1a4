use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, eigh, DensityMatrix, Operator};
use crate::scalar::{fmax, max_abs, Real};
use crate::tol;

/// Largest tensor-power dimension handled by [`complete_passivity`].
pub const MAX_TENSOR_DIM: usize = 1 << 22;

/// Energies and populations of a state in a joint eigenbasis with `H`.
#[derive(Clone, Debug)]
pub struct JointSpectrum<T: Real> {
    pub energies: Vec<T>,
    pub populations: Vec<T>,
}

/// Diagonalizes commuting `rho` and `h` simultaneously (level by level).
pub fn joint_spectrum<T: Real>(rho: &DensityMatrix<T>, h: &Operator<T>) -> Result<JointSpectrum<T>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho.dim() });
    }
    let comm = h.matrix() * rho.matrix() - rho.matrix() * h.matrix();
    let res = max_abs(&comm);
    if res > T::tol(tol::ALGEBRAIC) * fmax(T::one(), max_abs(h.matrix())) {
        return Err(Error::NotCommuting(res.to_f64_lossy()));
    }
    let eig = eig_hermitian(h)?;
    let mut energies = Vec::with_capacity(h.dim());
    let mut populations = Vec::with_capacity(h.dim());
    for lvl in eig.levels(T::of(tol::BOHR_MERGE)) {
        let v = eig.vectors.columns(lvl.indices.start, lvl.indices.len());
        let block = v.adjoint() * rho.matrix() * v;
        for p in eigh(&block).values {
            energies.push(lvl.energy);
            populations.push(p);
        }
    }
    Ok(JointSpectrum { energies, populations })
}

/// Passivity of a diagonal ensemble: for every pair of energy levels
/// `E_a < E_b`, the smallest population in `a` is not below the largest in `b`.
pub fn passive_spectrum<T: Real>(energies: &[T], populations: &[T], tol: T) -> bool {
    let mut idx: Vec<usize> = (0..energies.len()).collect();
    idx.sort_by(|&a, &b| energies[a].partial_cmp(&energies[b]).expect("finite energies"));
    let lo = energies[idx[0]];
    let hi = energies[idx[idx.len() - 1]];
    let merge = T::of(tol::BOHR_MERGE) * fmax(T::one(), hi - lo);
    let mut min_below = T::infinity();
    let mut k = 0;
    while k < idx.len() {
        let e = energies[idx[k]];
        let mut j = k;
        let mut bmin = T::infinity();
        let mut bmax = -T::infinity();
        while j < idx.len() && energies[idx[j]] - e <= merge {
            let p = populations[idx[j]];
            if p < bmin {
                bmin = p;
            }
            if p > bmax {
                bmax = p;
            }
            j += 1;
        }
        if bmax > min_below + tol {
            return false;
        }
        if bmin < min_below {
            min_below = bmin;
        }
        k = j;
    }
    true
}

/// Whether `rho` is passive with respect to `h`; `rho` and `h` must commute.
pub fn is_passive<T: Real>(rho: &DensityMatrix<T>, h: &Operator<T>) -> Result<bool> {
    let js = joint_spectrum(rho, h)?;
    Ok(passive_spectrum(&js.energies, &js.populations, T::tol(tol::ALGEBRAIC)))
}

/// Maximal unitary work extraction `Tr(rho H) - sum_k r_k^down e_k^up`.
pub fn ergotropy<T: Real>(rho: &DensityMatrix<T>, h: &Operator<T>) -> Result<T> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho.dim() });
    }
    let e = eig_hermitian(h)?.values;
    let mut r = rho.eigenvalues();
    r.reverse();
    let passive = e.iter().zip(r.iter()).fold(T::zero(), |a, (&x, &p)| a + x * p);
    Ok(rho.expectation(h) - passive)
}

/// Per-copy-number verdicts of passivity of `rho^{⊗n}` with respect to the
/// non-interacting `sum_i H_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletePassivity {
    /// `passive[n - 1]` is the verdict for `n` copies.
    pub passive: Vec<bool>,
    /// Smallest `n` at which passivity fails.
    pub first_failure: Option<usize>,
}

/// Checks passivity of `rho^{⊗n}` for `n = 1..=n_max`.
pub fn complete_passivity<T: Real>(rho: &DensityMatrix<T>, h: &Operator<T>, n_max: usize) -> Result<CompletePassivity> {
    let d = h.dim();
    let max_n = if d <= 1 {
        usize::MAX
    } else {
        let mut n = 0;
        let mut size = 1usize;
        while size.saturating_mul(d) <= MAX_TENSOR_DIM {
            size *= d;
            n += 1;
        }
        n
    };
    if n_max > max_n {
        return Err(Error::DimensionOverflow { base: d, n: n_max, max_n });
    }
    let js = joint_spectrum(rho, h)?;
    let mut energies = vec![T::zero()];
    let mut pops = vec![T::one()];
    let mut passive = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let mut ne = Vec::with_capacity(energies.len() * d);
        let mut np = Vec::with_capacity(energies.len() * d);
        for (e, p) in energies.iter().zip(pops.iter()) {
            for (e1, p1) in js.energies.iter().zip(js.populations.iter()) {
                ne.push(*e + *e1);
                np.push(*p * *p1);
            }
        }
        energies = ne;
        pops = np;
        passive.push(passive_spectrum(&energies, &pops, T::tol(tol::ALGEBRAIC)));
    }
    let first_failure = passive.iter().position(|&p| !p).map(|k| k + 1);
    Ok(CompletePassivity { passive, first_failure })
}
