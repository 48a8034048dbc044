mod common;

use common::{random_hermitian, random_state, rng};
use rand::Rng;
use spinscatter::channels::{embed, kondo_operators, KondoImpuritySpec};
use spinscatter::hilbert::{CMatrix, SpinOperator};
use spinscatter::scattering::{
    first_order_composition, matrix_amplitudes, scalar_amplitudes, scalar_potential, two_impurity_exact,
    ScalarAmplitudes, TwoImpurityGeometry, WaveNumber,
};
use spinscatter::C64;

fn wn(k: f64) -> WaveNumber {
    WaveNumber::new(k).unwrap()
}

/// Transmission through deltas g1 at -a and g2 at +a by summing the
/// multiple-reflection series in closed form:
/// t = S1 S2 / (1 - R1 R2 e^{4ika}).
fn double_delta_series(g1: f64, g2: f64, k: f64, a: f64) -> (C64, C64) {
    let one = ScalarAmplitudes::from_xi(g1 / k);
    let two = ScalarAmplitudes::from_xi(g2 / k);
    let round_trip = one.r * two.r * C64::from_polar(1.0, 4.0 * k * a);
    let t = one.s * two.s / (1.0 - round_trip);
    // reflection: direct bounce off the first delta, plus everything that
    // enters the cavity and leaks back out through it
    let r = one.r * C64::from_polar(1.0, -2.0 * k * a)
        + one.s * one.s * two.r * C64::from_polar(1.0, 2.0 * k * a) / (1.0 - round_trip);
    (t, r)
}

/// Boundary conditions at both deltas written as one dense 4d x 4d system
/// in the unknowns (r, A, B, t), solved for each incident spin column.
fn boundary_solve(m1: &CMatrix, m2: &CMatrix, k: f64, a: f64) -> (CMatrix, CMatrix) {
    let d = m1.nrows();
    let id = CMatrix::identity(d, d);
    let ik = C64::new(0.0, k);
    let ep = |x: f64| C64::from_polar(1.0, k * x);
    let em = |x: f64| C64::from_polar(1.0, -k * x);
    let (x1, x2) = (-a, a);
    let mut sys = CMatrix::zeros(4 * d, 4 * d);
    let mut rhs = CMatrix::zeros(4 * d, d);
    let mut put = |row: usize, col: usize, block: CMatrix| {
        sys.view_mut((row * d, col * d), (d, d)).copy_from(&block);
    };
    // columns: 0 = r, 1 = A, 2 = B, 3 = t
    // continuity at x1: em r - ep A - em B = -ep chi
    put(0, 0, &id * em(x1));
    put(0, 1, &id * -ep(x1));
    put(0, 2, &id * -em(x1));
    // jump at x1: ik (ep A - em B) + ik em r - 2 M1 (ep A + em B) = ik ep chi
    put(1, 0, &id * (ik * em(x1)));
    put(1, 1, &id * (ik * ep(x1)) - m1 * (2.0 * ep(x1)));
    put(1, 2, &id * (-ik * em(x1)) - m1 * (2.0 * em(x1)));
    // continuity at x2: ep A + em B - ep t = 0
    put(2, 1, &id * ep(x2));
    put(2, 2, &id * em(x2));
    put(2, 3, &id * -ep(x2));
    // jump at x2: ik ep t - ik ep A + ik em B - 2 M2 ep t = 0
    put(3, 1, &id * (-ik * ep(x2)));
    put(3, 2, &id * (ik * em(x2)));
    put(3, 3, &id * (ik * ep(x2)) - m2 * (2.0 * ep(x2)));
    rhs.view_mut((0, 0), (d, d)).copy_from(&(&id * -ep(x1)));
    rhs.view_mut((d, 0), (d, d)).copy_from(&(&id * (ik * ep(x1))));
    let sol = sys.lu().solve(&rhs).unwrap();
    (sol.view((3 * d, 0), (d, d)).into_owned(), sol.view((0, 0), (d, d)).into_owned())
}

#[test]
fn scalar_flux_on_grid() {
    for i in 0..401 {
        let xi = -10.0 + 20.0 * i as f64 / 400.0;
        let a = ScalarAmplitudes::from_xi(xi);
        assert!((a.s.norm_sqr() + a.r.norm_sqr() - 1.0).abs() < 1e-12, "xi = {xi}");
        assert_eq!(a.r, a.s - 1.0);
        // S(-xi) = conj S(xi)
        assert!((ScalarAmplitudes::from_xi(-xi).s - a.s.conj()).norm() < 1e-15);
    }
}

#[test]
fn matrix_flux_for_random_hermitian_potentials() {
    let mut rng = rng(11);
    for trial in 0..200 {
        let dim = [2, 4, 8][trial % 3];
        let m = random_hermitian(&mut rng, dim, 3.0);
        let k = rng.gen_range(0.1..5.0);
        let out = matrix_amplitudes(&m, wn(k)).unwrap();
        assert!(out.flux_defect() < 1e-11, "trial {trial}: {}", out.flux_defect());
        assert_eq!(out.r, out.t.clone() - SpinOperator::identity(dim));
    }
}

#[test]
fn diagonal_potential_matches_scalar_channels() {
    let mut rng = rng(12);
    for _ in 0..50 {
        let g: Vec<f64> = (0..4).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let k = rng.gen_range(0.2..3.0);
        let m = SpinOperator::diagonal(&g.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let out = matrix_amplitudes(&m, wn(k)).unwrap();
        for (i, &gi) in g.iter().enumerate() {
            let s = scalar_amplitudes(gi, wn(k)).unwrap();
            assert!((out.t.get(i, i) - s.s).norm() < 1e-13);
            assert!((out.r.get(i, i) - s.r).norm() < 1e-13);
        }
    }
}

#[test]
fn exact_solver_conserves_probability() {
    let mut rng = rng(13);
    for _ in 0..100 {
        let m1 = random_hermitian(&mut rng, 8, 2.0);
        let m2 = random_hermitian(&mut rng, 8, 2.0);
        let k = rng.gen_range(0.2..4.0);
        let a = rng.gen_range(0.05..5.0);
        let out = two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), m1, m2).unwrap()).unwrap();
        assert!(out.flux_defect() < 1e-10);
        let psi = random_state(&mut rng, 3);
        let (t, r) = out.scatter(&psi).unwrap();
        assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn single_impurity_reduction() {
    let mut rng = rng(14);
    for _ in 0..20 {
        let m1 = random_hermitian(&mut rng, 8, 2.0);
        let k = rng.gen_range(0.3..3.0);
        let a = rng.gen_range(0.1..3.0);
        let exact =
            two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), m1.clone(), SpinOperator::zeros(8)).unwrap())
                .unwrap();
        let single = matrix_amplitudes(&m1, wn(k)).unwrap();
        assert!(exact.t.max_deviation(&single.t) < 1e-12);
        // the reflected wave leaves from x = -a: R e^{-2ika}
        let shifted = single.r.scale(C64::from_polar(1.0, -2.0 * k * a));
        assert!(exact.r.max_deviation(&shifted) < 1e-12);
    }
}

#[test]
fn scalar_double_delta_matches_series_oracle() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let g = rng.gen_range(-3.0..3.0);
        let g2 = if rng.gen_bool(0.5) { g } else { rng.gen_range(-3.0..3.0) };
        let k = rng.gen_range(0.2..3.0);
        let a = rng.gen_range(0.05..4.0);
        let geom = TwoImpurityGeometry::new(a, wn(k), scalar_potential(g, 2), scalar_potential(g2, 2)).unwrap();
        let out = two_impurity_exact(&geom).unwrap();
        let (t, r) = double_delta_series(g, g2, k, a);
        for i in 0..2 {
            assert!((out.t.get(i, i) - t).norm() < 1e-12);
            assert!((out.r.get(i, i) - r).norm() < 1e-12);
        }
        assert!(out.t.get(0, 1).norm() < 1e-14);
    }
}

#[test]
fn transfer_matrix_matches_boundary_solve() {
    let mut rng = rng(16);
    for _ in 0..30 {
        let m1 = random_hermitian(&mut rng, 8, 1.5);
        let m2 = random_hermitian(&mut rng, 8, 1.5);
        let k = rng.gen_range(0.3..3.0);
        let a = rng.gen_range(0.1..3.0);
        let (t, r) = boundary_solve(m1.matrix(), m2.matrix(), k, a);
        let out = two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), m1, m2).unwrap()).unwrap();
        assert!((out.t.matrix() - t).norm() < 1e-10);
        assert!((out.r.matrix() - r).norm() < 1e-10);
    }
}

fn kondo_pair(g: f64, k: f64, a: f64) -> f64 {
    let spec = KondoImpuritySpec::paper(g).unwrap();
    let m1 = embed(&spec.potential(), 3, &[0, 1]).unwrap();
    let m2 = embed(&spec.potential(), 3, &[0, 2]).unwrap();
    let exact = two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), m1, m2).unwrap()).unwrap();
    let ch = kondo_operators(&spec, wn(k)).unwrap();
    let t1 = spinscatter::channels::embed_channel(&ch, 3, &[0, 1]).unwrap();
    let t2 = spinscatter::channels::embed_channel(&ch, 3, &[0, 2]).unwrap();
    let first = first_order_composition(&[t1, t2]).unwrap();
    exact.t.distance(&first)
}

#[test]
fn first_order_error_is_quadratic() {
    for ka in [1.0, 5.0] {
        for g in [0.05, 0.02, 0.01] {
            let ratio = kondo_pair(g, 1.0, ka) / kondo_pair(g / 2.0, 1.0, ka);
            assert!((3.5..=4.5).contains(&ratio), "ka={ka} g={g} ratio={ratio}");
        }
    }
}

#[test]
fn first_order_error_random_hermitian() {
    let mut rng = rng(17);
    for _ in 0..10 {
        let m1 = random_hermitian(&mut rng, 8, 1.0);
        let m2 = random_hermitian(&mut rng, 8, 1.0);
        let k = 1.0;
        let a = rng.gen_range(0.5..5.0);
        let err = |s: f64| {
            let (p, q) = (m1.scale(C64::new(s, 0.0)), m2.scale(C64::new(s, 0.0)));
            let exact = two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), p.clone(), q.clone()).unwrap()).unwrap();
            let first = first_order_composition(&[
                matrix_amplitudes(&p, wn(k)).unwrap(),
                matrix_amplitudes(&q, wn(k)).unwrap(),
            ])
            .unwrap();
            exact.t.distance(&first)
        };
        let ratio = err(0.01) / err(0.005);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}
