use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, eigh, partial_trace, DensityMatrix, Operator};
use crate::scalar::{CMatrix, Real};
use crate::tol;

fn plogp<T: Real>(p: T) -> T {
    if p > T::zero() {
        p * p.ln()
    } else {
        T::zero()
    }
}

/// `-Tr(rho ln rho)` in nats.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    -rho.eigenvalues().into_iter().fold(T::zero(), |a, p| a + plogp(p))
}

/// `ln rho` with eigenvalues clipped from below at the log floor.
pub fn log_regularized<T: Real>(rho: &CMatrix<T>) -> CMatrix<T> {
    let floor = T::of(tol::LOG_FLOOR);
    eigh(rho).map(|x| if x > floor { x.ln() } else { floor.ln() })
}

/// `S(rho || sigma) = Tr rho (ln rho - ln sigma)`; `+inf` when the support
/// of `rho` is not contained in the support of `sigma`.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let er = rho.spectrum();
    let es = sigma.spectrum();
    let floor = T::of(tol::LOG_FLOOR);
    let overlap = er.vectors.adjoint() * &es.vectors;
    let mut s = T::zero();
    for (i, &p) in er.values.iter().enumerate() {
        if p <= floor {
            continue;
        }
        s += plogp(p);
        for (j, &q) in es.values.iter().enumerate() {
            let w = overlap[(i, j)].norm_sqr();
            if q <= floor {
                if p * w > T::tol(tol::ALGEBRAIC) {
                    return Ok(T::infinity());
                }
                continue;
            }
            s -= p * w * q.ln();
        }
    }
    Ok(if s < T::zero() && s > -T::tol(tol::ALGEBRAIC) { T::zero() } else { s })
}

/// Shannon entropy of the populations of `rho` in the eigenbasis of `a`.
/// Degenerate eigenspaces use the eigensolver's basis.
pub fn shannon_entropy_in_basis<T: Real>(rho: &DensityMatrix<T>, a: &Operator<T>) -> Result<T> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    let eig = eig_hermitian(a)?;
    let diag = eig.to_eigenbasis(rho.matrix());
    Ok(-(0..rho.dim()).fold(T::zero(), |acc, k| acc + plogp(diag[(k, k)].re)))
}

/// `S(A) + S(B) - S(AB)` for a bipartite state with local dimensions `dims`.
pub fn mutual_information<T: Real>(rho: &DensityMatrix<T>, dims: [usize; 2]) -> Result<T> {
    let ra = DensityMatrix::unchecked(partial_trace(rho.matrix(), &dims, &[0])?);
    let rb = DensityMatrix::unchecked(partial_trace(rho.matrix(), &dims, &[1])?);
    Ok(von_neumann_entropy(&ra) + von_neumann_entropy(&rb) - von_neumann_entropy(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::{kron, KrausMap, Superoperator};
    use crate::random::{random_density, random_kraus, seeded};
    use proptest::prelude::*;

    #[test]
    fn maximally_mixed_entropy_is_log_d() {
        for d in 1..6 {
            let s = von_neumann_entropy(&DensityMatrix::<f64>::maximally_mixed(d));
            assert!((s - (d as f64).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_supports_give_infinity() {
        let a = DensityMatrix::<f64>::basis(2, 0);
        let b = DensityMatrix::<f64>::basis(2, 1);
        assert_eq!(relative_entropy(&a, &b).unwrap(), f64::INFINITY);
        assert_eq!(relative_entropy(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn shannon_dominates_von_neumann() {
        let mut rng = seeded(2);
        let rho = random_density::<f64>(4, &mut rng);
        let h = crate::random::random_hermitian::<f64>(4, &mut rng);
        assert!(shannon_entropy_in_basis(&rho, &h).unwrap() >= von_neumann_entropy(&rho) - 1e-12);
    }

    #[test]
    fn product_state_has_zero_mutual_information() {
        let mut rng = seeded(4);
        let a = random_density::<f64>(2, &mut rng);
        let b = random_density::<f64>(3, &mut rng);
        let ab = DensityMatrix::new(kron(a.matrix(), b.matrix())).unwrap();
        assert!(mutual_information(&ab, [2, 3]).unwrap().abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn relative_entropy_nonnegative(seed in 0u64..2000, d in 1usize..6) {
            let mut rng = seeded(seed);
            let a = random_density::<f64>(d, &mut rng);
            let b = random_density::<f64>(d, &mut rng);
            prop_assert!(relative_entropy(&a, &b).unwrap() >= -1e-12);
        }

        #[test]
        fn cptp_maps_contract_relative_entropy(seed in 0u64..500, d in 2usize..4, k in 1usize..4) {
            let mut rng = seeded(seed);
            let a = random_density::<f64>(d, &mut rng);
            let b = random_density::<f64>(d, &mut rng);
            let map: Superoperator<f64> = KrausMap::new(random_kraus::<f64>(d, k, &mut rng)).unwrap().to_superoperator();
            let ma = map.apply_state(&a).unwrap();
            let mb = map.apply_state(&b).unwrap();
            let before = relative_entropy(&a, &b).unwrap();
            let after = relative_entropy(&ma, &mb).unwrap();
            prop_assert!(after <= before + 1e-9, "{after} > {before}");
        }
    }
}
