use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::operator::SpinOperator;
use super::state::SpinState;
use super::C64;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis([f64; 3]);

impl Axis {
    pub const X: Axis = Axis([1.0, 0.0, 0.0]);
    pub const Y: Axis = Axis([0.0, 1.0, 0.0]);
    pub const Z: Axis = Axis([0.0, 0.0, 1.0]);

    /// Accepts only vectors already normalized to within 1e-10.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if !n.is_finite() || (n - 1.0).abs() > TOL.normalization {
            return Err(Error::BadAxis(n));
        }
        Ok(Self(v))
    }

    /// Rescales any nonzero finite vector to unit length.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::BadAxis(n));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// Polar angle from +z and azimuth from +x, in radians.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        Self::normalize([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Eigenvector of `n . sigma`, eigenvalue +1 for `Plus` and -1 for `Minus`.
    pub fn eigenvector(&self, outcome: Outcome) -> [C64; 2] {
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phase = if x == 0.0 && y == 0.0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, y.atan2(x)) };
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match outcome {
            Outcome::Plus => [C64::new(c, 0.0), phase * s],
            Outcome::Minus => [-phase.conj() * s, C64::new(c, 0.0)],
        }
    }

    /// `(I + sign * n . sigma) / 2`.
    pub fn projector(&self, outcome: Outcome) -> SpinOperator {
        let v = self.eigenvector(outcome);
        SpinOperator::outer(&v, &v)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Parses `x`, `y`, `z`, `-z`, ... or three comma-separated components.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "+x" => return Ok(Axis::X),
            "y" | "+y" => return Ok(Axis::Y),
            "z" | "+z" => return Ok(Axis::Z),
            "-x" => return Ok(Axis([-1.0, 0.0, 0.0])),
            "-y" => return Ok(Axis([0.0, -1.0, 0.0])),
            "-z" => return Ok(Axis([0.0, 0.0, -1.0])),
            _ => {}
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Precondition(format!("cannot parse axis '{s}'")))?;
        match parts[..] {
            [x, y, z] => Axis::normalize([x, y, z]),
            _ => Err(Error::Precondition(format!("axis '{s}' needs three components"))),
        }
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Sign of the measured spin component. Along +z, `Plus` is `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    /// Computational-basis bit for a z measurement.
    pub fn z_bit(self) -> u8 {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// Projects qubit `qubit` onto the `outcome` eigenstate of `axis . sigma`.
///
/// Returns the unnormalized projected state and its probability relative to
/// the squared norm of `s`.
pub fn project(s: &SpinState, qubit: usize, axis: Axis, outcome: Outcome) -> Result<(SpinState, f64)> {
    let n = s.num_qubits();
    if qubit >= n {
        return Err(Error::BadQubits(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let p = axis.projector(outcome);
    let shift = s.shift(qubit);
    let psi = s.amplitudes();
    let amps: Vec<C64> = (0..s.dim())
        .map(|i| {
            let bit = (i >> shift) & 1;
            let base = i & !(1 << shift);
            p.get(bit, 0) * psi[base] + p.get(bit, 1) * psi[base | (1 << shift)]
        })
        .collect();
    let out = s.with_amplitudes(amps)?;
    let total = s.norm_sqr();
    let prob = if total > 0.0 { out.norm_sqr() / total } else { 0.0 };
    Ok((out, prob))
}

/// Contracts qubit `qubit` with `<axis, outcome|`, removing it from the register.
///
/// For a state already projected on that outcome this is the conditional
/// state of the remaining qubits, with the same norm.
pub fn collapse(s: &SpinState, qubit: usize, axis: Axis, outcome: Outcome) -> Result<SpinState> {
    let n = s.num_qubits();
    if qubit >= n || n < 2 {
        return Err(Error::BadQubits(format!("cannot remove qubit {qubit} from {n} qubits")));
    }
    let bra = axis.eigenvector(outcome).map(|c| c.conj());
    let shift = s.shift(qubit);
    let psi = s.amplitudes();
    let low_mask = (1usize << shift) - 1;
    let amps = (0..s.dim() / 2)
        .map(|j| {
            let base = ((j & !low_mask) << 1) | (j & low_mask);
            bra[0] * psi[base] + bra[1] * psi[base | (1 << shift)]
        })
        .collect();
    let mut labels = s.labels().to_vec();
    labels.remove(qubit);
    SpinState::new(amps, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Party;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> SpinState {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let o = C64::new(0.0, 0.0);
        SpinState::new(vec![h, o, o, h], vec![Party::Particle(2), Party::Particle(1)]).unwrap()
    }

    #[test]
    fn z_projection_of_basis_ket() {
        let s = SpinState::basis(&[0], vec![Party::Impurity(0)]).unwrap();
        let (out, p) = project(&s, 0, Axis::Z, Outcome::Plus).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn bell_projection() {
        let (out, p) = project(&bell(), 0, Axis::Z, Outcome::Plus).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((out.amplitude(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(out.amplitude(3), C64::new(0.0, 0.0));
        assert!(!out.is_normalized());
    }

    #[test]
    fn x_projection_probabilities_sum_to_one() {
        let s = SpinState::qubit(C64::new(0.6, 0.0), C64::new(0.0, 0.8), Party::Particle(1)).unwrap();
        let (_, p1) = project(&s, 0, Axis::X, Outcome::Plus).unwrap();
        let (_, p2) = project(&s, 0, Axis::X, Outcome::Minus).unwrap();
        assert!((p1 + p2 - 1.0).abs() < 1e-15);
        // <+x| (0.6, 0.8i) = (0.6 + 0.8i)/sqrt2
        assert!((p1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenvectors_match_pauli() {
        for v in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 2.0, -0.5], [0.3, -0.1, 0.9]] {
            let axis = Axis::normalize(v).unwrap();
            let sigma = SpinOperator::pauli_along(axis.components());
            for (o, sign) in [(Outcome::Plus, 1.0), (Outcome::Minus, -1.0)] {
                let e = axis.eigenvector(o);
                let m = sigma.matrix();
                for r in 0..2 {
                    let lhs = m[(r, 0)] * e[0] + m[(r, 1)] * e[1];
                    assert!((lhs - e[r] * sign).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn collapse_drops_measured_qubit() {
        let s = SpinState::basis(&[1, 0, 0], vec![Party::Particle(2), Party::Particle(1), Party::Impurity(0)]).unwrap();
        let out = collapse(&s, 2, Axis::Z, Outcome::Plus).unwrap();
        assert_eq!(out.labels(), &[Party::Particle(2), Party::Particle(1)]);
        assert_eq!(out.amplitude(2), C64::new(1.0, 0.0));
        let out = collapse(&s, 0, Axis::Z, Outcome::Minus).unwrap();
        assert_eq!(out.amplitude(0), C64::new(1.0, 0.0));
        let out = collapse(&s, 0, Axis::Z, Outcome::Plus).unwrap();
        assert_eq!(out.norm_sqr(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(project(&bell(), 2, Axis::Z, Outcome::Plus), Err(Error::BadQubits(_))));
        assert!(matches!(Axis::new([0.0, 0.0, 0.0]), Err(Error::BadAxis(_))));
        assert!(matches!(Axis::new([0.0, 0.0, 2.0]), Err(Error::BadAxis(_))));
        assert!(Axis::normalize([0.0, 0.0, 0.0]).is_err());
        assert_eq!("z".parse::<Axis>().unwrap(), Axis::Z);
        assert_eq!("0,0,3".parse::<Axis>().unwrap(), Axis::Z);
        assert!("1,2".parse::<Axis>().is_err());
    }
}
