use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::C64;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

/// Square complex matrix acting on 1 to 3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator(CMatrix);

impl SpinOperator {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
        }
        if !matches!(m.nrows(), 2 | 4 | 8) {
            return Err(Error::BadLength(m.nrows()));
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Self(m))
    }

    /// Row-major construction.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: entries.len(), right: dim * dim });
        }
        Self::from_matrix(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self(CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) }))
    }

    /// `|psi><phi|` for two vectors of equal length.
    pub fn outer(psi: &[C64], phi: &[C64]) -> Self {
        Self(CMatrix::from_fn(psi.len(), phi.len(), |i, j| psi[i] * phi[j].conj()))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self(CMatrix::from_row_slice(2, 2, &[o, l, l, o]))
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self(CMatrix::from_row_slice(2, 2, &[o, -i, i, o]))
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)])
    }

    /// `n . sigma` for a real 3-vector `n`.
    pub fn pauli_along(axis: [f64; 3]) -> Self {
        Self::pauli_x().scale(C64::new(axis[0], 0.0))
            + Self::pauli_y().scale(C64::new(axis[1], 0.0))
            + Self::pauli_z().scale(C64::new(axis[2], 0.0))
    }

    /// Two-qubit SWAP.
    pub fn swap() -> Self {
        let mut m = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.map(|x| x * c))
    }

    pub fn kron(&self, other: &SpinOperator) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &SpinOperator) -> f64 {
        (&self.0 - &other.0).norm()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &SpinOperator) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }

    pub fn commutator(&self, other: &SpinOperator) -> SpinOperator {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn checked_mul(&self, other: &SpinOperator) -> Result<SpinOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(Self(&self.0 * &other.0))
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

impl Add for SpinOperator {
    type Output = SpinOperator;
    fn add(self, rhs: SpinOperator) -> SpinOperator {
        SpinOperator(self.0 + rhs.0)
    }
}

impl Sub for SpinOperator {
    type Output = SpinOperator;
    fn sub(self, rhs: SpinOperator) -> SpinOperator {
        SpinOperator(self.0 - rhs.0)
    }
}

impl Mul for &SpinOperator {
    type Output = SpinOperator;
    fn mul(self, rhs: &SpinOperator) -> SpinOperator {
        SpinOperator(&self.0 * &rhs.0)
    }
}
