//! Delta-potential scattering amplitudes.
//!
//! Units are hbar = m = 1 and the Hamiltonian is `H = -1/2 d^2/dx^2 + M delta(x)`.
//! Integrating across the origin gives the derivative jump
//!
//! ```text
//! psi'(0+) - psi'(0-) = 2 M psi(0)
//! ```
//!
//! (the factor 2 comes from the 1/2 in the kinetic term). For an incident
//! `e^{ikx}` this yields `S = 1/(1 + i g/k)` and `R = S - 1` in the scalar
//! case, and `(I + i M/k) T = I` for a matrix potential acting on spin.
//!
//! Attractive couplings are accepted. Their bound state lies outside the
//! scattering problem and is not modelled.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{operator::max_abs, CMatrix, SpinOperator, SpinState, C64};
use crate::tolerance::TOL;

/// Wave number of the incident plane wave, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::BadWaveNumber(k));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

fn finite_coupling(g: f64) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::NonFinite("coupling"));
    }
    Ok(g)
}

/// Transmission and reflection amplitudes of one scalar channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarAmplitudes {
    pub s: C64,
    pub r: C64,
    pub xi: f64,
}

impl ScalarAmplitudes {
    /// Amplitudes for a dimensionless strength `xi = g/k`.
    pub fn from_xi(xi: f64) -> Self {
        let s = C64::new(1.0, 0.0) / C64::new(1.0, xi);
        Self { s, r: s - 1.0, xi }
    }

    pub fn transmission_probability(&self) -> f64 {
        self.s.norm_sqr()
    }

    pub fn reflection_probability(&self) -> f64 {
        self.r.norm_sqr()
    }
}

pub fn scalar_amplitudes(g: f64, k: WaveNumber) -> Result<ScalarAmplitudes> {
    let g = finite_coupling(g)?;
    Ok(ScalarAmplitudes::from_xi(g / k.get()))
}

/// Operator-valued transmission `t` and reflection `r = t - I` on spin space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAmplitudes {
    pub t: SpinOperator,
    pub r: SpinOperator,
}

impl OperatorAmplitudes {
    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// Largest entry of `t^dagger t + r^dagger r - I`.
    pub fn flux_defect(&self) -> f64 {
        let sum = &self.t.adjoint() * &self.t + &self.r.adjoint() * &self.r;
        sum.max_deviation(&SpinOperator::identity(self.dim()))
    }
}

/// Solves `(I + i M/k) T = I` by a dense LU solve.
pub fn matrix_amplitudes(potential: &SpinOperator, k: WaveNumber) -> Result<OperatorAmplitudes> {
    let defect = potential.hermiticity_defect();
    if defect > TOL.hermitian {
        return Err(Error::NotHermitian(defect));
    }
    let d = potential.dim();
    let id = CMatrix::identity(d, d);
    let a = &id + potential.matrix() * C64::new(0.0, 1.0 / k.get());
    let t = solve(a.clone(), id.clone())?;
    let residual = max_abs(&(&a * &t - &id));
    if residual > TOL.solver {
        return Err(Error::Internal(format!("channel solve residual {residual:e}")));
    }
    let r = &t - &id;
    Ok(OperatorAmplitudes { t: SpinOperator::from_matrix(t)?, r: SpinOperator::from_matrix(r)? })
}

fn solve(a: CMatrix, b: CMatrix) -> Result<CMatrix> {
    a.lu().solve(&b).ok_or_else(|| Error::Internal("singular scattering system".into()))
}

/// Two matrix-valued delta impurities at `x = -a` and `x = +a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoImpurityGeometry {
    half_separation: f64,
    k: WaveNumber,
    left: SpinOperator,
    right: SpinOperator,
}

impl TwoImpurityGeometry {
    pub fn new(half_separation: f64, k: WaveNumber, left: SpinOperator, right: SpinOperator) -> Result<Self> {
        if !(half_separation.is_finite() && half_separation > 0.0) {
            return Err(Error::BadSeparation(half_separation));
        }
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch { left: left.dim(), right: right.dim() });
        }
        for m in [&left, &right] {
            let defect = m.hermiticity_defect();
            if defect > TOL.hermitian {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(Self { half_separation, k, left, right })
    }

    pub fn half_separation(&self) -> f64 {
        self.half_separation
    }

    pub fn k(&self) -> WaveNumber {
        self.k
    }

    pub fn potentials(&self) -> (&SpinOperator, &SpinOperator) {
        (&self.left, &self.right)
    }
}

/// Exact transmission and reflection of the two-impurity system.
///
/// Both are amplitudes of `e^{+ikx}` and `e^{-ikx}` written with phases
/// referenced to `x = 0`, so a single impurity anywhere transmits with the
/// same `T` as at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAmplitudes {
    pub t: SpinOperator,
    pub r: SpinOperator,
}

impl ExactAmplitudes {
    pub fn flux_defect(&self) -> f64 {
        let sum = &self.t.adjoint() * &self.t + &self.r.adjoint() * &self.r;
        sum.max_deviation(&SpinOperator::identity(self.t.dim()))
    }

    /// Transmitted and reflected spin states for an incident spinor.
    pub fn scatter(&self, incident: &SpinState) -> Result<(SpinState, SpinState)> {
        Ok((incident.apply(&self.t)?, incident.apply(&self.r)?))
    }
}

/// Maps plane-wave coefficients `(A, B)` of `A e^{ikx} + B e^{-ikx}` just
/// left of a delta at `x0` to those just right of it.
fn delta_transfer(m: &CMatrix, k: f64, x0: f64) -> CMatrix {
    let d = m.nrows();
    let id = CMatrix::identity(d, d);
    let ik = C64::new(0.0, 1.0 / k);
    let fwd = C64::from_polar(1.0, 2.0 * k * x0);
    let mut w = CMatrix::zeros(2 * d, 2 * d);
    w.view_mut((0, 0), (d, d)).copy_from(&(&id - m * ik));
    w.view_mut((0, d), (d, d)).copy_from(&(m * (-ik * fwd.conj())));
    w.view_mut((d, 0), (d, d)).copy_from(&(m * (ik * fwd)));
    w.view_mut((d, d), (d, d)).copy_from(&(&id + m * ik));
    w
}

/// Exact plane-wave solution over the three regions, including all
/// multiple reflections between the impurities.
pub fn two_impurity_exact(geom: &TwoImpurityGeometry) -> Result<ExactAmplitudes> {
    let k = geom.k.get();
    let a = geom.half_separation;
    let d = geom.left.dim();
    let w = delta_transfer(geom.right.matrix(), k, a) * delta_transfer(geom.left.matrix(), k, -a);

    // (t, 0) = W (chi, r)  =>  r = -W22^-1 W21 chi,  t = (W11 + W12 r) chi
    let w11 = w.view((0, 0), (d, d)).into_owned();
    let w12 = w.view((0, d), (d, d)).into_owned();
    let w21 = w.view((d, 0), (d, d)).into_owned();
    let w22 = w.view((d, d), (d, d)).into_owned();
    let r = -solve(w22.clone(), w21.clone())?;
    let residual = max_abs(&(&w22 * &r + &w21));
    if residual > TOL.solver {
        return Err(Error::Internal(format!("transfer solve residual {residual:e}")));
    }
    let t = w11 + w12 * &r;
    Ok(ExactAmplitudes { t: SpinOperator::from_matrix(t)?, r: SpinOperator::from_matrix(r)? })
}

/// Product `T_n ... T_2 T_1` of transmission operators in scattering order.
///
/// Reflections between impurities are neglected. The propagation phase
/// between impurities is common to every spin component and is dropped.
pub fn first_order_composition(ops: &[OperatorAmplitudes]) -> Result<SpinOperator> {
    let (first, rest) =
        ops.split_first().ok_or_else(|| Error::Precondition("no transmission operators to compose".into()))?;
    rest.iter().try_fold(first.t.clone(), |acc, op| op.t.checked_mul(&acc))
}

/// Scalar potentials lifted to `g I` on a spin space of dimension `dim`.
pub fn scalar_potential(g: f64, dim: usize) -> SpinOperator {
    SpinOperator::from_matrix(DMatrix::identity(dim, dim) * C64::new(g, 0.0)).expect("identity has a valid dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> WaveNumber {
        WaveNumber::new(1.0).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let a = scalar_amplitudes(0.0, k1()).unwrap();
        assert_eq!(a.s, C64::new(1.0, 0.0));
        assert_eq!(a.r, C64::new(0.0, 0.0));

        let a = scalar_amplitudes(1.0, k1()).unwrap();
        assert!((a.s - C64::new(0.5, -0.5)).norm() < 1e-16);
        assert!((a.transmission_probability() - 0.5).abs() < 1e-16);
        assert!((a.reflection_probability() - 0.5).abs() < 1e-16);

        let a = scalar_amplitudes(-2.0, WaveNumber::new(2.0).unwrap()).unwrap();
        assert_eq!(a.xi, -1.0);
        assert!((a.s - C64::new(0.5, 0.5)).norm() < 1e-16);
    }

    #[test]
    fn scalar_errors() {
        assert!(matches!(WaveNumber::new(0.0), Err(Error::BadWaveNumber(_))));
        assert!(matches!(WaveNumber::new(-1.0), Err(Error::BadWaveNumber(_))));
        assert!(WaveNumber::new(f64::NAN).is_err());
        assert!(scalar_amplitudes(f64::INFINITY, k1()).is_err());
    }

    #[test]
    fn strong_coupling_limit() {
        let a = ScalarAmplitudes::from_xi(1e3);
        assert!((a.s.norm() - 1.0 / (1.0f64 + 1e6).sqrt()).abs() < 1e-12);
        assert!(a.s.norm() < 2e-3);
    }

    #[test]
    fn matrix_examples() {
        let out = matrix_amplitudes(&SpinOperator::zeros(2), k1()).unwrap();
        assert_eq!(out.t, SpinOperator::identity(2));
        assert_eq!(out.r, SpinOperator::zeros(2));

        let (r, k) = (0.35, 0.9);
        let m = SpinOperator::diagonal(&[C64::new(0.0, 0.0), C64::new(2.0 * r, 0.0)]);
        let out = matrix_amplitudes(&m, WaveNumber::new(k).unwrap()).unwrap();
        let s = C64::new(1.0, 0.0) / C64::new(1.0, 2.0 * r / k);
        assert!((out.t.get(0, 0) - 1.0).norm() < 1e-13);
        assert!((out.t.get(1, 1) - s).norm() < 1e-13);
        assert!(out.t.get(0, 1).norm() < 1e-13);
        assert!(out.flux_defect() < 1e-12);
    }

    #[test]
    fn matrix_rejects_non_hermitian() {
        let m = SpinOperator::from_rows(
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(matrix_amplitudes(&m, k1()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn free_two_impurity_system_is_transparent() {
        let geom = TwoImpurityGeometry::new(1.3, k1(), SpinOperator::zeros(8), SpinOperator::zeros(8)).unwrap();
        let out = two_impurity_exact(&geom).unwrap();
        assert!(out.t.max_deviation(&SpinOperator::identity(8)) < 1e-15);
        assert!(out.r.max_deviation(&SpinOperator::zeros(8)) < 1e-15);
    }

    #[test]
    fn geometry_validation() {
        let z = SpinOperator::zeros(8);
        assert!(matches!(TwoImpurityGeometry::new(0.0, k1(), z.clone(), z.clone()), Err(Error::BadSeparation(_))));
        assert!(matches!(
            TwoImpurityGeometry::new(1.0, k1(), z, SpinOperator::zeros(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn composition_examples() {
        let m = SpinOperator::diagonal(&[C64::new(0.3, 0.0), C64::new(-0.2, 0.0)]);
        let one = matrix_amplitudes(&m, k1()).unwrap();
        assert_eq!(first_order_composition(std::slice::from_ref(&one)).unwrap(), one.t);

        let free = matrix_amplitudes(&SpinOperator::zeros(4), k1()).unwrap();
        assert_eq!(first_order_composition(&[free.clone(), free]).unwrap(), SpinOperator::identity(4));
        assert!(first_order_composition(&[]).is_err());

        let small = matrix_amplitudes(&SpinOperator::zeros(2), k1()).unwrap();
        let big = matrix_amplitudes(&SpinOperator::zeros(4), k1()).unwrap();
        assert!(matches!(first_order_composition(&[small, big]), Err(Error::DimensionMismatch { .. })));
    }
}
