use nalgebra::{DVector, SymmetricEigen};

use super::operator::{max_abs, CMatrix};
use super::state::SpinState;
use super::C64;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Hermitian, positive semidefinite matrix with positive real trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity and a positive trace. Positivity of the
    /// spectrum is checked lazily when eigenvalues are requested.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = max_abs(&(&m - m.adjoint()));
        if defect > TOL.hermitian {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if tr.re <= 0.0 || tr.im.abs() > TOL.hermitian {
            return Err(Error::BadTrace(tr.re));
        }
        Ok(Self(m))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        let n = p.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(p[i], 0.0) } else { C64::new(0.0, 0.0) }))
    }

    /// `|psi><psi|`.
    pub fn pure(s: &SpinState) -> Result<Self> {
        let v = s.amplitudes();
        Self::new(CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Reduced density matrix of the qubits in `keep`, ordered as listed.
///
/// The trace of the result equals the squared norm of `s`, so
/// unnormalized post-selection branches reduce consistently.
pub fn partial_trace(s: &SpinState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = s.num_qubits();
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::BadQubits(format!("keep set {keep:?} must be a nonempty proper subset of {n} qubits")));
    }
    let mut seen = [false; 8];
    for &q in keep {
        if q >= n || seen[q] {
            return Err(Error::BadQubits(format!("invalid keep set {keep:?}")));
        }
        seen[q] = true;
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();

    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept_bits >> (keep.len() - 1 - pos)) & 1;
            idx |= bit << s.shift(q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << s.shift(q);
        }
        idx
    };

    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let psi = s.amplitudes();
    let m = CMatrix::from_fn(dk, dk, |i, j| (0..dt).map(|e| psi[compose(i, e)] * psi[compose(j, e)].conj()).sum());
    DensityMatrix::new(m)
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues
/// and the unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let defect = max_abs(&(m - m.adjoint()));
    if defect > TOL.hermitian {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DensityMatrix) -> Result<Vec<f64>> {
    let (values, vectors) = hermitian_eigen(m.matrix())?;
    let lambda =
        CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))));
    let residual = (m.matrix() - &vectors * lambda * vectors.adjoint()).norm();
    if residual > TOL.solver {
        return Err(Error::Internal(format!("eigendecomposition residual {residual:e}")));
    }
    Ok(values)
}

/// Eigenvalues with round-off negatives in `[-eigen_clip, 0)` set to zero.
pub(crate) fn clipped_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues(rho)?
        .into_iter()
        .map(|p| {
            if p >= 0.0 {
                Ok(p)
            } else if p >= -TOL.eigen_clip {
                Ok(0.0)
            } else {
                Err(Error::NegativeEigenvalue(p))
            }
        })
        .collect()
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn shannon_bits(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    // -0.0 and tiny negative round-off from p = 1 terms
    h.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > TOL.normalization {
        return Err(Error::BadTrace(tr));
    }
    let spectrum = clipped_spectrum(rho)?;
    let max = (rho.dim() as f64).log2();
    Ok(shannon_bits(&spectrum).min(max))
}
