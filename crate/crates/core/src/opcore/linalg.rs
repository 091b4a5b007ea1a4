use nalgebra::{SymmetricEigen, SVD};

use super::operator::{hermitian_residual, hermitize, OpKind, Operator};
use crate::error::{Error, Result};
use crate::scalar::{all_finite, cr, fmax, max_abs, CMatrix, CVector, Real, C};
use crate::tol;

/// Eigendecomposition of a hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix<T>,
}

/// Block of (numerically) degenerate eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Level<T: Real> {
    pub energy: T,
    /// Indices into the ascending eigenvalue list.
    pub indices: std::ops::Range<usize>,
}

/// Raw hermitian eigensolver on the hermitian part of `m`.
pub(crate) fn eigh<T: Real>(m: &CMatrix<T>) -> SpectralDecomposition<T> {
    let d = m.nrows();
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    SpectralDecomposition { values, vectors }
}

/// Eigendecomposition of a hermitian operator.
///
/// Accepts operators tagged hermitian, or untagged ones whose hermitian
/// residual is within the structural tolerance.
pub fn eig_hermitian<T: Real>(a: &Operator<T>) -> Result<SpectralDecomposition<T>> {
    if a.kind() != OpKind::Hermitian {
        let res = hermitian_residual(a.matrix());
        if res > T::tol(tol::STRUCTURAL) * fmax(T::one(), max_abs(a.matrix())) {
            return Err(Error::NotHermitian { residual: res.to_f64_lossy() });
        }
    }
    Ok(eigh(a.matrix()))
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `sum_j f(lambda_j) |v_j><v_j|`.
    pub fn map(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            let s = cr(f(self.values[j]));
            for i in 0..d {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Same as [`map`](Self::map) with a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            let s = f(self.values[j]);
            for i in 0..d {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Projector onto the span of the eigenvectors in `indices`.
    pub fn projector(&self, indices: std::ops::Range<usize>) -> CMatrix<T> {
        let cols = self.vectors.columns(indices.start, indices.len());
        &cols * cols.adjoint()
    }

    /// Groups eigenvalues whose consecutive gaps are below `rel_tol` times
    /// the spectral range (or absolute `rel_tol` for a flat spectrum).
    pub fn levels(&self, rel_tol: T) -> Vec<Level<T>> {
        group_levels(&self.values, rel_tol)
    }

    /// Matrix of `V^dagger A V`.
    pub fn to_eigenbasis(&self, a: &CMatrix<T>) -> CMatrix<T> {
        self.vectors.adjoint() * a * &self.vectors
    }

    /// Matrix of `V A V^dagger`.
    pub fn from_eigenbasis(&self, a: &CMatrix<T>) -> CMatrix<T> {
        &self.vectors * a * self.vectors.adjoint()
    }
}

/// Merges consecutive sorted values closer than `rel_tol * range`.
pub fn group_levels<T: Real>(sorted: &[T], rel_tol: T) -> Vec<Level<T>> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let range = sorted[sorted.len() - 1] - sorted[0];
    let thresh = rel_tol * fmax(range, T::one());
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        if k == sorted.len() || sorted[k] - sorted[k - 1] > thresh {
            let n = T::of((k - start) as f64);
            let mean = sorted[start..k].iter().fold(T::zero(), |a, &b| a + b) / n;
            out.push(Level { energy: mean, indices: start..k });
            start = k;
        }
    }
    out
}

/// Square complex matrix wrapper that [`matexp`] can exponentiate.
pub trait SquareMatrix<T: Real>: Sized {
    fn as_matrix(&self) -> &CMatrix<T>;
    fn from_exponential(&self, m: CMatrix<T>) -> Self;
}

impl<T: Real> SquareMatrix<T> for CMatrix<T> {
    fn as_matrix(&self) -> &CMatrix<T> {
        self
    }
    fn from_exponential(&self, m: CMatrix<T>) -> Self {
        m
    }
}

impl<T: Real> SquareMatrix<T> for Operator<T> {
    fn as_matrix(&self) -> &CMatrix<T> {
        self.matrix()
    }
    fn from_exponential(&self, m: CMatrix<T>) -> Self {
        Operator::with_kind(m, OpKind::General)
    }
}

/// `exp(t A)` by Padé scaling and squaring.
pub fn matexp<T: Real, M: SquareMatrix<T>>(a: &M, t: T) -> Result<M> {
    let m = a.as_matrix();
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if !all_finite(m) || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let e = (m * cr(t)).exp();
    if !all_finite(&e) {
        return Err(Error::Numerical("matrix exponential overflowed".into()));
    }
    Ok(a.from_exponential(e))
}

/// `exp(-i H t)` through the eigenbasis of `H`.
pub fn unitary_propagator<T: Real>(h: &Operator<T>, t: T) -> Result<Operator<T>> {
    let eig = eig_hermitian(h)?;
    let u = eig.map_complex(|e| {
        let ph = -e * t;
        C::new(ph.cos(), ph.sin())
    });
    Ok(Operator::with_kind(u, OpKind::Unitary))
}

/// Kronecker product `A ⊗ B` with the first factor as the major index.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Tensor product of operators, keeping tags both factors share.
pub fn tensor<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    let kind = if a.kind() == b.kind() { a.kind() } else { OpKind::General };
    Operator::with_kind(kron(a.matrix(), b.matrix()), kind)
}

/// Tensor product of a list of operators.
pub fn tensor_all<T: Real>(ops: &[Operator<T>]) -> Operator<T> {
    let mut it = ops.iter();
    let first = it.next().expect("non-empty operator list").clone();
    it.fold(first, |acc, o| tensor(&acc, o))
}

/// Places `op` on `site` of a register with local dimensions `dims`.
pub fn embed<T: Real>(op: &Operator<T>, site: usize, dims: &[usize]) -> Result<Operator<T>> {
    if site >= dims.len() || dims[site] != op.dim() {
        return Err(Error::DimensionMismatch { expected: dims.get(site).copied().unwrap_or(0), found: op.dim() });
    }
    let factors: Vec<Operator<T>> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == site { op.clone() } else { Operator::identity(d) })
        .collect();
    let out = tensor_all(&factors);
    let kind = if op.kind() == OpKind::General { OpKind::General } else { op.kind() };
    Ok(Operator::with_kind(out.into_matrix(), kind))
}

/// Partial trace keeping the subsystems listed in `keep` (in register order).
pub fn partial_trace<T: Real>(m: &CMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<CMatrix<T>> {
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, found: m.nrows() });
    }
    let n = dims.len();
    let mut keep_mask = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::InvalidParameter(format!("subsystem {k} out of range")));
        }
        keep_mask[k] = true;
    }
    let kept_dims: Vec<usize> = (0..n).filter(|&k| keep_mask[k]).map(|k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let mut out = CMatrix::zeros(dk, dk);
    let digits = |mut idx: usize| {
        let mut v = vec![0usize; n];
        for k in (0..n).rev() {
            v[k] = idx % dims[k];
            idx /= dims[k];
        }
        v
    };
    for r in 0..total {
        let dr = digits(r);
        for col in 0..total {
            let dc = digits(col);
            if (0..n).any(|k| !keep_mask[k] && dr[k] != dc[k]) {
                continue;
            }
            let mut ri = 0;
            let mut ci = 0;
            for k in 0..n {
                if keep_mask[k] {
                    ri = ri * dims[k] + dr[k];
                    ci = ci * dims[k] + dc[k];
                }
            }
            out[(ri, ci)] += m[(r, col)];
        }
    }
    Ok(out)
}

/// Right null space of a square matrix: singular vectors whose singular
/// value is below `rel_tol * max(1, s_max)`.
pub fn null_space<T: Real>(m: &CMatrix<T>, rel_tol: T) -> Result<Vec<CVector<T>>> {
    let svd = SVD::try_new(m.clone(), false, true, T::epsilon(), 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let vt = svd.v_t.as_ref().expect("requested right singular vectors");
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &b| fmax(a, b));
    let thresh = rel_tol * fmax(smax, T::one());
    Ok((0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= thresh)
        .map(|k| vt.row(k).adjoint())
        .collect())
}

/// Ascending singular values.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<T> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite singular values"));
    s
}

/// Spectral norm.
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).last().copied().unwrap_or(T::zero())
}
