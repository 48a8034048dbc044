#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinscatter::hilbert::{CMatrix, Party, SpinOperator, SpinState};
use spinscatter::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> SpinOperator {
    let a = CMatrix::from_fn(dim, dim, |_, _| random_complex(rng, scale));
    SpinOperator::from_matrix((&a + a.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

pub fn labels(n: usize) -> Vec<Party> {
    [Party::Particle(2), Party::Particle(1), Party::Impurity(0)][..n].to_vec()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> SpinState {
    let amps = (0..1 << n).map(|_| random_complex(rng, 1.0)).collect();
    SpinState::new(amps, labels(n)).unwrap().normalized().unwrap()
}

/// Haar-ish random single-qubit unitary from Euler angles and a phase.
pub fn random_unitary(rng: &mut impl Rng) -> SpinOperator {
    let (a, b, c, d): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (th, p1, p2, g) = (a * tau, b * tau, c * tau, d * tau);
    let e = |x: f64| C64::from_polar(1.0, x);
    let (cs, sn) = ((th / 2.0).cos(), (th / 2.0).sin());
    SpinOperator::from_rows(2, &[e(g + p1) * cs, -e(g + p2) * sn, e(g - p2) * sn, e(g - p1) * cs]).unwrap()
}
