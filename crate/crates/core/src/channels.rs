//! Spin channels of a fixed impurity and of a Kondo (spin-exchange) impurity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Axis, CMatrix, Outcome, Party, SpinOperator, SpinState, C64};
use crate::scattering::{OperatorAmplitudes, ScalarAmplitudes, WaveNumber};

/// Impurity whose spin is frozen along `axis`. Its potential is
/// `r (1 - axis . sigma)`: invisible to a particle aligned with the axis,
/// a `2r` delta barrier for the anti-aligned component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedImpuritySpec {
    pub r: f64,
    pub axis: Axis,
}

impl FixedImpuritySpec {
    pub fn new(r: f64, axis: Axis) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::NonFinite("coupling"));
        }
        Ok(Self { r, axis })
    }

    pub fn along_z(r: f64) -> Result<Self> {
        Self::new(r, Axis::Z)
    }

    pub fn potential(&self) -> SpinOperator {
        let r = C64::new(self.r, 0.0);
        (SpinOperator::identity(2) - SpinOperator::pauli_along(self.axis.components())).scale(r)
    }

    /// Amplitudes of the anti-aligned component, `xi = 2r/k`.
    pub fn blocked_channel(&self, k: WaveNumber) -> ScalarAmplitudes {
        ScalarAmplitudes::from_xi(2.0 * self.r / k.get())
    }
}

/// Transmission `diag(1, S)` in the axis eigenbasis, rotated back to the
/// computational basis: `T = I + (S - 1) P_-`.
pub fn fixed_filter_operators(spec: &FixedImpuritySpec, k: WaveNumber) -> Result<OperatorAmplitudes> {
    let amp = spec.blocked_channel(k);
    let blocked = spec.axis.projector(Outcome::Minus);
    let r = blocked.scale(amp.r);
    let t = SpinOperator::identity(2) + r.clone();
    Ok(OperatorAmplitudes { t, r })
}

/// Exchange-operator spectrum on the basis `|00>, |11>, triplet-0, singlet`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KondoEigenvalues(pub [f64; 4]);

impl KondoEigenvalues {
    /// Values used throughout the protocols: `(1, 1, -2, 0)`.
    pub const PAPER: KondoEigenvalues = KondoEigenvalues([1.0, 1.0, -2.0, 0.0]);
    /// Spectrum of `sigma_1 . sigma_0`: triplet +1, singlet -3.
    pub const STANDARD_PAULI: KondoEigenvalues = KondoEigenvalues([1.0, 1.0, 1.0, -3.0]);

    pub fn new(values: [f64; 4]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Kondo eigenvalues"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }
}

impl Default for KondoEigenvalues {
    fn default() -> Self {
        Self::PAPER
    }
}

impl FromStr for KondoEigenvalues {
    type Err = Error;

    /// `paper`, `standard-pauli`, or four comma-separated numbers.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(Self::PAPER),
            "standard-pauli" => Ok(Self::STANDARD_PAULI),
            other => {
                let v: Vec<f64> = other
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Precondition(format!("unknown eigenvalue preset '{s}'")))?;
                match v[..] {
                    [a, b, c, d] => Self::new([a, b, c, d]),
                    _ => Err(Error::Precondition(format!("eigenvalue list '{s}' needs four entries"))),
                }
            }
        }
    }
}

impl fmt::Display for KondoEigenvalues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::PAPER {
            f.write_str("paper")
        } else if *self == Self::STANDARD_PAULI {
            f.write_str("standard-pauli")
        } else {
            let [a, b, c, d] = self.0;
            write!(f, "{a},{b},{c},{d}")
        }
    }
}

/// Eigenstates `|00>, |11>, (|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2` of the
/// exchange operator, paired with their eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeEigenbasis {
    pub states: [SpinState; 4],
    pub eigenvalues: [f64; 4],
}

pub fn exchange_eigenbasis(ev: KondoEigenvalues) -> ExchangeEigenbasis {
    let labels = vec![Party::Particle(1), Party::Impurity(0)];
    let (o, l, h) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let make = |v: [C64; 4]| SpinState::new(v.to_vec(), labels.clone()).expect("valid two-qubit state");
    ExchangeEigenbasis {
        states: [make([l, o, o, o]), make([o, o, o, l]), make([o, h, h, o]), make([o, h, -h, o])],
        eigenvalues: ev.values(),
    }
}

/// Spectral projectors of the exchange basis with exact `1/2` entries, so
/// that `sum_i P_i = I` holds bit for bit.
fn exchange_projectors() -> [SpinOperator; 4] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let rows = |e: [C64; 16]| SpinOperator::from_rows(4, &e).expect("4x4");
    [
        rows([l, o, o, o, o, o, o, o, o, o, o, o, o, o, o, o]),
        rows([o, o, o, o, o, o, o, o, o, o, o, o, o, o, o, l]),
        rows([o, o, o, o, o, h, h, o, o, h, h, o, o, o, o, o]),
        rows([o, o, o, o, o, h, -h, o, o, -h, h, o, o, o, o, o]),
    ]
}

/// Kondo impurity with potential `r delta(x) sum_i lambda_i |lambda_i><lambda_i|`
/// acting on (particle, impurity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KondoImpuritySpec {
    pub r: f64,
    pub eigenvalues: KondoEigenvalues,
}

impl KondoImpuritySpec {
    pub fn new(r: f64, eigenvalues: KondoEigenvalues) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::NonFinite("coupling"));
        }
        Ok(Self { r, eigenvalues })
    }

    pub fn paper(r: f64) -> Result<Self> {
        Self::new(r, KondoEigenvalues::PAPER)
    }

    /// Per-channel amplitudes `S_i = 1/(1 + i r lambda_i / k)`.
    pub fn channel_amplitudes(&self, k: WaveNumber) -> [ScalarAmplitudes; 4] {
        self.eigenvalues.values().map(|l| ScalarAmplitudes::from_xi(self.r * l / k.get()))
    }

    /// The exchange potential as a 4x4 operator.
    pub fn potential(&self) -> SpinOperator {
        exchange_projectors()
            .iter()
            .zip(self.eigenvalues.values())
            .fold(SpinOperator::zeros(4), |acc, (p, l)| acc + p.scale(C64::new(self.r * l, 0.0)))
    }
}

/// `T = sum_i S_i |lambda_i><lambda_i|`, `R = T - I`.
///
/// On the computational basis:
/// `|01> -> (S3+S4)/2 |01> + (S3-S4)/2 |10>` and
/// `|10> -> (S3-S4)/2 |01> + (S3+S4)/2 |10>`.
pub fn kondo_operators(spec: &KondoImpuritySpec, k: WaveNumber) -> Result<OperatorAmplitudes> {
    let amps = spec.channel_amplitudes(k);
    let projectors = exchange_projectors();
    let mut t = SpinOperator::zeros(4);
    let mut r = SpinOperator::zeros(4);
    for (p, a) in projectors.iter().zip(amps) {
        t = t + p.scale(a.s);
        r = r + p.scale(a.r);
    }
    Ok(OperatorAmplitudes { t, r })
}

/// Lifts `op` to `total_qubits`, acting on `targets` (first target is the
/// most significant qubit of `op`) and as identity elsewhere.
pub fn embed(op: &SpinOperator, total_qubits: usize, targets: &[usize]) -> Result<SpinOperator> {
    if targets.is_empty() || 1usize << targets.len() != op.dim() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: 1 << targets.len() });
    }
    let mut seen = [false; 8];
    for &t in targets {
        if t >= total_qubits || total_qubits > 3 || seen[t] {
            return Err(Error::BadQubits(format!("targets {targets:?} invalid for {total_qubits} qubits")));
        }
        seen[t] = true;
    }
    let shift = |q: usize| total_qubits - 1 - q;
    let target_mask: usize = targets.iter().map(|&q| 1 << shift(q)).sum();
    let sub = |i: usize| targets.iter().fold(0usize, |acc, &q| (acc << 1) | ((i >> shift(q)) & 1));
    let dim = 1usize << total_qubits;
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        if i & !target_mask == j & !target_mask {
            op.get(sub(i), sub(j))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SpinOperator::from_matrix(m)
}

/// Embeds both `t` and `r` of a channel.
pub fn embed_channel(ch: &OperatorAmplitudes, total_qubits: usize, targets: &[usize]) -> Result<OperatorAmplitudes> {
    Ok(OperatorAmplitudes { t: embed(&ch.t, total_qubits, targets)?, r: embed(&ch.r, total_qubits, targets)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::matrix_amplitudes;

    fn k(v: f64) -> WaveNumber {
        WaveNumber::new(v).unwrap()
    }

    #[test]
    fn eigenbasis_presets() {
        assert_eq!(exchange_eigenbasis(KondoEigenvalues::default()).eigenvalues, [1.0, 1.0, -2.0, 0.0]);
        assert_eq!(exchange_eigenbasis("standard-pauli".parse().unwrap()).eigenvalues, [1.0, 1.0, 1.0, -3.0]);
    }

    #[test]
    fn standard_pauli_preset_diagonalizes_sigma_dot_sigma() {
        let ss = SpinOperator::pauli_x().kron(&SpinOperator::pauli_x())
            + SpinOperator::pauli_y().kron(&SpinOperator::pauli_y())
            + SpinOperator::pauli_z().kron(&SpinOperator::pauli_z());
        let spec = KondoImpuritySpec::new(1.0, KondoEigenvalues::STANDARD_PAULI).unwrap();
        assert!(spec.potential().max_deviation(&ss) < 1e-15);
    }

    #[test]
    fn eigenbasis_is_orthonormal() {
        let basis = exchange_eigenbasis(KondoEigenvalues::PAPER);
        for (i, a) in basis.states.iter().enumerate() {
            for (j, b) in basis.states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn projectors_match_eigenbasis() {
        let basis = exchange_eigenbasis(KondoEigenvalues::PAPER);
        for (p, s) in exchange_projectors().iter().zip(&basis.states) {
            let outer = SpinOperator::outer(s.amplitudes(), s.amplitudes());
            assert!(p.max_deviation(&outer) < 1e-15);
        }
    }

    #[test]
    fn fixed_filter_examples() {
        let out = fixed_filter_operators(&FixedImpuritySpec::along_z(0.0).unwrap(), k(1.0)).unwrap();
        assert_eq!(out.t, SpinOperator::identity(2));

        let out = fixed_filter_operators(&FixedImpuritySpec::along_z(0.5).unwrap(), k(1.0)).unwrap();
        let expected = SpinOperator::diagonal(&[C64::new(1.0, 0.0), C64::new(0.5, -0.5)]);
        assert!(out.t.max_deviation(&expected) < 1e-15);

        let out = fixed_filter_operators(&FixedImpuritySpec::new(1e9, Axis::X).unwrap(), k(1.0)).unwrap();
        let plus_x = Axis::X.projector(Outcome::Plus);
        assert!(out.t.max_deviation(&plus_x) < 1e-9);
    }

    #[test]
    fn fixed_filter_matches_linear_solve() {
        for (r, kv, axis) in
            [(0.3, 1.0, Axis::Z), (1.2, 0.4, Axis::X), (-0.7, 2.0, Axis::normalize([1.0, -2.0, 0.5]).unwrap())]
        {
            let spec = FixedImpuritySpec::new(r, axis).unwrap();
            let direct = matrix_amplitudes(&spec.potential(), k(kv)).unwrap();
            let built = fixed_filter_operators(&spec, k(kv)).unwrap();
            assert!(direct.t.max_deviation(&built.t) < 1e-12);
            assert!(direct.r.max_deviation(&built.r) < 1e-12);
        }
    }

    #[test]
    fn kondo_values_at_r_equals_k() {
        let spec = KondoImpuritySpec::paper(1.0).unwrap();
        let [s1, _, s3, s4] = spec.channel_amplitudes(k(1.0)).map(|a| a.s);
        assert!((s1 - C64::new(0.5, -0.5)).norm() < 1e-15);
        assert!((s3 - C64::new(0.2, 0.4)).norm() < 1e-15);
        assert_eq!(s4, C64::new(1.0, 0.0));

        let t = kondo_operators(&spec, k(1.0)).unwrap().t;
        let plus = C64::new(0.6, 0.2);
        let minus = C64::new(-0.4, 0.2);
        // columns are images of |01> and |10>
        assert!((t.get(1, 1) - plus).norm() < 1e-15);
        assert!((t.get(2, 1) - minus).norm() < 1e-15);
        assert!((t.get(1, 2) - minus).norm() < 1e-15);
        assert!((t.get(2, 2) - plus).norm() < 1e-15);

        let direct = matrix_amplitudes(&spec.potential(), k(1.0)).unwrap();
        assert!(direct.t.max_deviation(&t) < 1e-12);
    }

    #[test]
    fn kondo_identity_at_zero_coupling() {
        for ev in [KondoEigenvalues::PAPER, KondoEigenvalues::STANDARD_PAULI] {
            let out = kondo_operators(&KondoImpuritySpec::new(0.0, ev).unwrap(), k(0.7)).unwrap();
            assert_eq!(out.t, SpinOperator::identity(4));
            assert_eq!(out.t.get(2, 2), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn kondo_commutes_with_swap() {
        let t = kondo_operators(&KondoImpuritySpec::paper(0.8).unwrap(), k(1.3)).unwrap().t;
        let sw = SpinOperator::swap();
        assert!((&(&sw * &t) * &sw).max_deviation(&t) < 1e-15);
    }

    #[test]
    fn embed_examples() {
        assert_eq!(embed(&SpinOperator::identity(2), 3, &[0]).unwrap(), SpinOperator::identity(8));

        let s = C64::new(0.5, -0.5);
        let filt = SpinOperator::diagonal(&[C64::new(1.0, 0.0), s]);
        let labels = vec![Party::Particle(2), Party::Particle(1), Party::Impurity(0)];
        let psi = SpinState::basis(&[0, 1, 0], labels.clone()).unwrap();
        let out = psi.apply(&embed(&filt, 3, &[1]).unwrap()).unwrap();
        assert_eq!(out.amplitude(0b010), s);
        assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-16);

        let spec = KondoImpuritySpec::paper(1.0).unwrap();
        let t = kondo_operators(&spec, k(1.0)).unwrap().t;
        let psi = SpinState::basis(&[0, 0, 1], labels).unwrap();
        let out = psi.apply(&embed(&t, 3, &[1, 2]).unwrap()).unwrap();
        assert!((out.amplitude(0b001) - C64::new(0.6, 0.2)).norm() < 1e-15);
        assert!((out.amplitude(0b010) - C64::new(-0.4, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn embed_reversed_targets_swaps_roles() {
        let a = SpinOperator::pauli_x().kron(&SpinOperator::pauli_z());
        let fwd = embed(&a, 2, &[1, 0]).unwrap();
        let expected = SpinOperator::pauli_z().kron(&SpinOperator::pauli_x());
        assert!(fwd.max_deviation(&expected) < 1e-15);
    }

    #[test]
    fn embed_errors() {
        let id = SpinOperator::identity(2);
        assert!(matches!(embed(&id, 3, &[3]), Err(Error::BadQubits(_))));
        assert!(matches!(embed(&id, 3, &[0, 1]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(embed(&SpinOperator::identity(4), 3, &[1, 1]), Err(Error::BadQubits(_))));
    }
}
