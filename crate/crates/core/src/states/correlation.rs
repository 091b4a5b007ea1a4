use crate::error::{Error, Result};
use crate::opcore::{eig_hermitian, Operator};
use crate::scalar::{cr, fmax, Real, C};
use crate::states::thermal::boltzmann_weights;
use crate::tol;

/// Spectral line of a thermal two-point function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationLine<T: Real> {
    /// Bohr frequency `E_n - E_m`.
    pub omega: T,
    /// `sum_{E_n - E_m = omega} p_m A_mn B_nm`.
    pub amplitude: C<T>,
}

/// Line spectrum of `F_AB(t) = Tr(rho_beta A(t) B)`, so that
/// `F_AB(t) = sum_lines amplitude * exp(-i omega t)`.
pub fn correlation_amplitudes<T: Real>(
    h: &Operator<T>,
    beta: T,
    a: &Operator<T>,
    b: &Operator<T>,
) -> Result<Vec<CorrelationLine<T>>> {
    if !(beta >= T::zero()) {
        return Err(Error::NegativeBeta(beta.to_f64_lossy()));
    }
    let d = h.dim();
    for o in [a, b] {
        if o.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: o.dim() });
        }
    }
    let eig = eig_hermitian(h)?;
    let p = boltzmann_weights(&eig.values, beta);
    let ae = eig.to_eigenbasis(a.matrix());
    let be = eig.to_eigenbasis(b.matrix());
    let range = fmax(T::one(), eig.values[d - 1] - eig.values[0]);
    let merge = T::of(tol::BOHR_MERGE) * range;
    let mut raw: Vec<(T, C<T>)> = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            raw.push((eig.values[n] - eig.values[m], ae[(m, n)] * be[(n, m)] * cr(p[m])));
        }
    }
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
    let mut lines: Vec<CorrelationLine<T>> = Vec::new();
    let mut k = 0;
    while k < raw.len() {
        let start = k;
        let mut amp = cr(T::zero());
        let mut wsum = T::zero();
        while k < raw.len() && raw[k].0 - raw[start].0 <= merge {
            amp += raw[k].1;
            wsum += raw[k].0;
            k += 1;
        }
        lines.push(CorrelationLine { omega: wsum / T::of((k - start) as f64), amplitude: amp });
    }
    Ok(lines)
}

/// Time-domain `Tr(rho_beta e^{iHt} A e^{-iHt} B)` by direct products.
pub fn correlation_function<T: Real>(h: &Operator<T>, beta: T, a: &Operator<T>, b: &Operator<T>, t: T) -> Result<C<T>> {
    let rho = crate::states::gibbs_state(h, beta)?;
    let u = crate::opcore::unitary_propagator(h, t)?;
    let at = u.matrix().adjoint() * a.matrix() * u.matrix();
    Ok((rho.matrix() * at * b.matrix()).trace())
}

/// Largest `|F_BA(-omega) - exp(-beta omega) F_AB(omega)|` over the lines.
pub fn kms_check<T: Real>(h: &Operator<T>, beta: T, a: &Operator<T>, b: &Operator<T>) -> Result<T> {
    let ab = correlation_amplitudes(h, beta, a, b)?;
    let ba = correlation_amplitudes(h, beta, b, a)?;
    let range = {
        let e = eig_hermitian(h)?.values;
        fmax(T::one(), e[e.len() - 1] - e[0])
    };
    let find = |lines: &[CorrelationLine<T>], w: T| {
        lines
            .iter()
            .find(|l| (l.omega - w).abs() <= T::of(tol::BOHR_MERGE) * range)
            .map(|l| l.amplitude)
            .unwrap_or(cr(T::zero()))
    };
    let mut freqs: Vec<T> = ab.iter().map(|l| l.omega).chain(ba.iter().map(|l| -l.omega)).collect();
    freqs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut worst = T::zero();
    for &w in &freqs {
        let fab = find(&ab, w);
        let fba = find(&ba, -w);
        let r = if w.abs() <= T::of(tol::BOHR_MERGE) * range {
            (fba - fab).norm_sqr().sqrt()
        } else {
            let factor = (-beta * w).exp();
            if factor.is_finite() {
                (fba - fab * cr(factor)).norm_sqr().sqrt()
            } else {
                // zero temperature, negative frequency: F_AB must vanish there
                fab.norm_sqr().sqrt()
            }
        };
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}
