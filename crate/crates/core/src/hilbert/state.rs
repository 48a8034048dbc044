use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::operator::SpinOperator;
use super::C64;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

pub const MAX_QUBITS: usize = 3;

/// Role tag of one qubit in a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Particle(u8),
    Impurity(u8),
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Particle(i) => write!(f, "particle-{i}"),
            Party::Impurity(i) => write!(f, "impurity-{i}"),
        }
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("unknown qubit label '{s}'"));
        let (kind, idx) = s.rsplit_once('-').ok_or_else(bad)?;
        let idx: u8 = idx.parse().map_err(|_| bad())?;
        match kind {
            "particle" => Ok(Party::Particle(idx)),
            "impurity" => Ok(Party::Impurity(idx)),
            _ => Err(bad()),
        }
    }
}

/// Pure (possibly unnormalized) state of up to three spin-1/2 qubits.
///
/// Qubit 0 is the leftmost label and the most significant bit of the
/// amplitude index, so `|0>_2 |0>_1 |1>_0` with labels
/// `[particle-2, particle-1, impurity-0]` lives at index `0b001`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    amplitudes: Vec<C64>,
    labels: Vec<Party>,
    normalized: bool,
}

impl SpinState {
    /// Stores `amplitudes` verbatim. The normalized flag is set only when
    /// the squared norm is within tolerance of one.
    pub fn new(amplitudes: Vec<C64>, labels: Vec<Party>) -> Result<Self> {
        let n = match amplitudes.len() {
            2 => 1,
            4 => 2,
            8 => 3,
            len => return Err(Error::BadLength(len)),
        };
        if labels.len() != n {
            return Err(Error::LabelCount { expected: n, got: labels.len() });
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        Ok(Self { amplitudes, labels, normalized: (norm_sqr - 1.0).abs() < TOL.normalization })
    }

    /// Computational basis ket; `bits[q]` is the value of qubit `q`.
    pub fn basis(bits: &[u8], labels: Vec<Party>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_QUBITS {
            return Err(Error::TooManyQubits(bits.len()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Precondition(format!("basis bits must be 0 or 1, got {bits:?}")));
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << bits.len()];
        amps[idx] = C64::new(1.0, 0.0);
        Self::new(amps, labels)
    }

    /// Parses a bitstring such as `"001"` into a basis ket.
    pub fn from_bitstring(bits: &str, labels: Vec<Party>) -> Result<Self> {
        let bits: Vec<u8> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Precondition(format!("bad bitstring '{bits}'"))),
            })
            .collect::<Result<_>>()?;
        Self::basis(&bits, labels)
    }

    /// `alpha|0> + beta|1>` for a single qubit.
    pub fn qubit(alpha: C64, beta: C64, label: Party) -> Result<Self> {
        Self::new(vec![alpha, beta], vec![label])
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, idx: usize) -> C64 {
        self.amplitudes[idx]
    }

    pub fn labels(&self) -> &[Party] {
        &self.labels
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Position of `party` in the register.
    pub fn index_of(&self, party: Party) -> Option<usize> {
        self.labels.iter().position(|&p| p == party)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the state scaled to unit norm. Zero states cannot be normalized.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::Precondition("cannot normalize a zero state".into()));
        }
        let amplitudes = self.amplitudes.iter().map(|c| c / n).collect();
        Ok(Self { amplitudes, labels: self.labels.clone(), normalized: true })
    }

    pub fn inner(&self, other: &SpinState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`.
    pub fn fidelity(&self, other: &SpinState) -> Result<f64> {
        let overlap = self.inner(other)?.norm_sqr();
        Ok(overlap / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Kronecker product with `self` on the left (more significant bits).
    pub fn tensor(&self, other: &SpinState) -> Result<SpinState> {
        let n = self.num_qubits() + other.num_qubits();
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        SpinState::new(amps, labels)
    }

    /// Matrix-vector product. The result never carries the normalized flag
    /// since channel operators contract the norm.
    pub fn apply(&self, op: &SpinOperator) -> Result<SpinState> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: op.dim(), right: self.dim() });
        }
        let m = op.matrix();
        let amps = (0..self.dim()).map(|i| (0..self.dim()).map(|j| m[(i, j)] * self.amplitudes[j]).sum()).collect();
        let mut out = SpinState::new(amps, self.labels.clone())?;
        out.normalized = false;
        Ok(out)
    }

    /// Bit position of qubit `q` inside the amplitude index.
    pub(crate) fn shift(&self, q: usize) -> usize {
        self.num_qubits() - 1 - q
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Result<SpinState> {
        SpinState::new(amplitudes, self.labels.clone())
    }
}

/// Free-function form of [`SpinState::new`].
pub fn make_state(amplitudes: Vec<C64>, labels: Vec<Party>) -> Result<SpinState> {
    SpinState::new(amplitudes, labels)
}

pub fn tensor(a: &SpinState, b: &SpinState) -> Result<SpinState> {
    a.tensor(b)
}

pub fn apply(op: &SpinOperator, s: &SpinState) -> Result<SpinState> {
    s.apply(op)
}
