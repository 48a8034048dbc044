/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Exact algebraic identities (R = S - 1, flux sums, orthonormality).
    pub algebraic: f64,
    /// Residuals of linear solves and eigendecompositions.
    pub solver: f64,
    /// Distance of a norm from one for a state to count as normalized.
    pub normalization: f64,
    /// Largest entry of M - M† still accepted as Hermitian.
    pub hermitian: f64,
    /// Negative eigenvalues above -eigen_clip are rounded to zero.
    pub eigen_clip: f64,
    /// Branch weights at or below this are treated as vanished.
    pub vanishing: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        solver: 1e-10,
        normalization: 1e-10,
        hermitian: 1e-12,
        eigen_clip: 1e-12,
        vanishing: 1e-28,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
