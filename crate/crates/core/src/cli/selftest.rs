//! Deterministic invariant checks behind `spinscatter selftest`.

use super::emit::{Column, Report};
use crate::channels::{
    embed, embed_channel, fixed_filter_operators, kondo_operators, FixedImpuritySpec, KondoEigenvalues,
    KondoImpuritySpec,
};
use crate::error::Result;
use crate::hilbert::{Axis, SpinOperator, SpinState, C64};
use crate::protocols::{
    concentrate_fixed, default_impurities_initial, default_particles_initial, entangle_impurities, entangle_particles,
    optimal_coupling_fixed, Mode, ProtocolOutcome,
};
use crate::scattering::{
    first_order_composition, matrix_amplitudes, two_impurity_exact, ScalarAmplitudes, TwoImpurityGeometry, WaveNumber,
};

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    /// Value must lie in `[lower, bound]`; `lower` is 0 for deviations.
    pub lower: f64,
}

impl Check {
    fn deviation(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, bound, lower: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value >= self.lower && self.value <= self.bound
    }
}

fn wn(k: f64) -> WaveNumber {
    WaveNumber::new(k).expect("positive wave number")
}

/// Hermitian test potential whose entries vary smoothly with `seed`.
fn structured_hermitian(dim: usize, seed: f64) -> SpinOperator {
    let mut e = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        e[i * dim + i] = C64::new((seed * (i as f64 + 1.0)).sin() * 2.0, 0.0);
        for j in i + 1..dim {
            let z = C64::new((seed * (i + 2 * j) as f64).cos(), (seed + (i * j) as f64).sin()) * 0.8;
            e[i * dim + j] = z;
            e[j * dim + i] = z.conj();
        }
    }
    SpinOperator::from_rows(dim, &e).expect("square finite matrix")
}

fn kondo_first_order_error(g: f64, k: f64, a: f64) -> Result<f64> {
    let spec = KondoImpuritySpec::paper(g)?;
    let m1 = embed(&spec.potential(), 3, &[0, 1])?;
    let m2 = embed(&spec.potential(), 3, &[0, 2])?;
    let exact = two_impurity_exact(&TwoImpurityGeometry::new(a, wn(k), m1, m2)?)?;
    let ch = kondo_operators(&spec, wn(k))?;
    let first = first_order_composition(&[embed_channel(&ch, 3, &[0, 1])?, embed_channel(&ch, 3, &[0, 2])?])?;
    Ok(exact.t.distance(&first))
}

pub fn checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let worst = (0..401)
        .map(|i| {
            let a = ScalarAmplitudes::from_xi(-10.0 + 0.05 * i as f64);
            (a.s.norm_sqr() + a.r.norm_sqr() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::deviation("scalar unitarity", worst, 1e-12));

    let mut worst = 0.0f64;
    for (n, dim) in [2, 4, 8].into_iter().cycle().take(60).enumerate() {
        let m = structured_hermitian(dim, 0.37 + 0.11 * n as f64);
        worst = worst.max(matrix_amplitudes(&m, wn(0.2 + 0.07 * n as f64))?.flux_defect());
    }
    out.push(Check::deviation("matrix flux", worst, 1e-11));

    let mut worst = 0.0f64;
    for r in [0.05, 0.5, 1.0, 3.0] {
        let k = wn(1.0);
        let direct = matrix_amplitudes(&SpinOperator::diagonal(&[C64::new(0.0, 0.0), C64::new(2.0 * r, 0.0)]), k)?;
        let filter = fixed_filter_operators(&FixedImpuritySpec::along_z(r)?, k)?;
        worst = worst.max(direct.t.max_deviation(&filter.t));
    }
    out.push(Check::deviation("filter vs linear solve", worst, 1e-13));

    let mut worst = 0.0f64;
    for ev in [KondoEigenvalues::PAPER, KondoEigenvalues::STANDARD_PAULI] {
        for (r, k) in [(0.1, 0.5), (1.0, 1.0), (2.5, 0.7), (-0.8, 2.0)] {
            let spec = KondoImpuritySpec::new(r, ev)?;
            let eig = kondo_operators(&spec, wn(k))?;
            let lin = matrix_amplitudes(&spec.potential(), wn(k))?;
            worst = worst.max(eig.t.max_deviation(&lin.t));
        }
    }
    out.push(Check::deviation("kondo eigen vs linear solve", worst, 1e-12));

    let kondo0 = kondo_operators(&KondoImpuritySpec::paper(0.0)?, wn(1.0))?;
    let fixed0 = fixed_filter_operators(&FixedImpuritySpec::new(0.0, Axis::X)?, wn(1.0))?;
    let worst =
        kondo0.t.max_deviation(&SpinOperator::identity(4)).max(fixed0.t.max_deviation(&SpinOperator::identity(2)));
    out.push(Check::deviation("identity at zero coupling", worst, 1e-15));

    let (a, b) = (C64::new((1.0f64 / 3.0).sqrt(), 0.0), C64::new((2.0f64 / 3.0).sqrt(), 0.0));
    let r = optimal_coupling_fixed(a, b, wn(1.0))?;
    out.push(Check::deviation("optimal coupling |r - 0.5|", (r - 0.5).abs(), 1e-10));
    let run = concentrate_fixed(a, b, wn(1.0), r, Axis::Z)?;
    out.push(Check::deviation("optimum entropy |E - 1|", (run.primary().entropy_bits - 1.0).abs(), 1e-9));
    out.push(Check::deviation("optimum probability |p - 2/3|", (run.primary().probability - 2.0 / 3.0).abs(), 1e-12));

    let spec = KondoImpuritySpec::paper(0.8)?;
    let aligned = SpinState::basis(&[0, 0, 0], default_particles_initial().labels().to_vec())?;
    let run = entangle_particles(wn(1.0), &spec, &aligned, Axis::Z)?;
    let worst = run
        .tree
        .branches
        .iter()
        .map(|b| ProtocolOutcome::from_branch(b, &run.tree, &[0]).map(|o| o.entropy_bits))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(Check::deviation("aligned spins stay unentangled", worst, 1e-12));

    let spec = KondoImpuritySpec::paper(1.0)?;
    let run = entangle_particles(wn(1.0), &spec, &default_particles_initial(), Axis::Z)?;
    let post = run.primary().post_state.clone().expect("branch has weight");
    let dev =
        (post.amplitude(0b10).norm_sqr() - 4.0 / 9.0).abs().max((post.amplitude(0b01).norm_sqr() - 5.0 / 9.0).abs());
    out.push(Check::deviation("two-particle branch 4/9 : 5/9", dev, 1e-9));

    let mut worst = 0.0f64;
    for i in 0..20 {
        let x = i as f64;
        let spec = KondoImpuritySpec::paper(0.15 * x - 1.0)?;
        let spec2 = KondoImpuritySpec::paper(0.3 + 0.05 * x)?;
        let k = wn(0.3 + 0.1 * x);
        let p = entangle_particles(k, &spec, &default_particles_initial(), Axis::from_angles(0.2 * x, x)?)?;
        let fo =
            entangle_impurities(k, [&spec, &spec2], 0.5, &default_impurities_initial(), Mode::FirstOrder, Axis::Z)?;
        let ex = entangle_impurities(
            k,
            [&spec, &spec2],
            0.2 + 0.3 * x,
            &default_impurities_initial(),
            Mode::Exact,
            Axis::Z,
        )?;
        let c =
            concentrate_fixed(C64::new(0.6, 0.0), C64::from_polar(0.8, x), k, 0.1 * x, Axis::from_angles(x, 0.3 * x)?)?;
        for t in [&p.tree, &fo.tree, &ex.tree, &c.tree] {
            worst = worst.max((t.total_probability() - 1.0).abs());
        }
    }
    out.push(Check::deviation("event tree completeness", worst, 1e-10));

    for (name, ka) in [("first-order error ratio, ka = 1", 1.0), ("first-order error ratio, ka = 5", 5.0)] {
        let ratio = kondo_first_order_error(0.02, 1.0, ka)? / kondo_first_order_error(0.01, 1.0, ka)?;
        out.push(Check { name, value: ratio, bound: 4.5, lower: 3.5 });
    }

    let mut worst = 0.0f64;
    for n in 0..20 {
        let m1 = structured_hermitian(8, 0.21 + 0.13 * n as f64);
        let m2 = structured_hermitian(8, 1.7 + 0.09 * n as f64);
        let geom = TwoImpurityGeometry::new(0.1 + 0.2 * n as f64, wn(0.4 + 0.15 * n as f64), m1, m2)?;
        worst = worst.max(two_impurity_exact(&geom)?.flux_defect());
    }
    out.push(Check::deviation("exact solver flux", worst, 1e-10));

    Ok(out)
}

pub fn report(checks: &[Check]) -> Report {
    let mut rep = Report::new(vec![
        Column::text("check"),
        Column::real("value"),
        Column::real("lower"),
        Column::real("upper"),
        Column::text("status"),
    ]);
    for c in checks {
        rep.push(vec![
            c.name.into(),
            c.value.into(),
            c.lower.into(),
            c.bound.into(),
            if c.passed() { "pass" } else { "FAIL" }.into(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    rep.notes.push(format!("{} of {} checks passed", checks.len() - failed, checks.len()));
    rep
}
