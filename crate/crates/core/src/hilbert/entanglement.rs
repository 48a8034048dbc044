use super::density::{clipped_spectrum, partial_trace, von_neumann_entropy};
use super::state::SpinState;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

fn require_normalized(s: &SpinState) -> Result<()> {
    let n2 = s.norm_sqr();
    if (n2 - 1.0).abs() > TOL.normalization {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

/// `2 |c00 c11 - c01 c10|` for a normalized pure two-qubit state.
pub fn concurrence(s: &SpinState) -> Result<f64> {
    if s.num_qubits() != 2 {
        return Err(Error::BadQubits(format!("concurrence needs 2 qubits, got {}", s.num_qubits())));
    }
    require_normalized(s)?;
    let c = s.amplitudes();
    Ok((2.0 * (c[0] * c[3] - c[1] * c[2]).norm()).min(1.0))
}

/// Schmidt coefficients across the cut `part | rest`, descending.
///
/// The vector has `2^min(|part|, |rest|)` entries.
pub fn schmidt_coefficients(s: &SpinState, part: &[usize]) -> Result<Vec<f64>> {
    require_normalized(s)?;
    let n = s.num_qubits();
    let mut seen = [false; 8];
    for &q in part {
        if q >= n || seen[q] {
            return Err(Error::BadQubits(format!("invalid bipartition {part:?}")));
        }
        seen[q] = true;
    }
    // reduce on the smaller side so the spectrum has no padding zeros
    let rest: Vec<usize> = (0..n).filter(|q| !part.contains(q)).collect();
    let side = if part.len() <= rest.len() { part } else { &rest[..] };
    let rho = partial_trace(s, side)?;
    let mut coeffs: Vec<f64> = clipped_spectrum(&rho)?.into_iter().map(f64::sqrt).collect();
    coeffs.sort_by(|a, b| b.total_cmp(a));
    Ok(coeffs)
}

/// Entanglement entropy in bits between the qubits in `part` and the rest.
/// The state is normalized first; a vanished state has no entanglement.
pub fn entanglement_entropy(s: &SpinState, part: &[usize]) -> Result<f64> {
    if s.norm_sqr() <= TOL.vanishing {
        return Ok(0.0);
    }
    let s = s.normalized()?;
    von_neumann_entropy(&partial_trace(&s, part)?)
}

/// `h(p) = -p log2 p - (1-p) log2(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    super::density::shannon_bits(&[p, 1.0 - p])
}

/// Entropy of a pure two-qubit state predicted from its concurrence.
pub fn entropy_from_concurrence(c: f64) -> f64 {
    binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}
