//! Entanglement creation through Kondo impurities.

use std::fmt;
use std::str::FromStr;

use super::outcome::{ProtocolOutcome, ProtocolRun};
use super::tree::{Branch, EventTree, Step};
use crate::channels::{embed, embed_channel, kondo_operators, KondoImpuritySpec};
use crate::error::{Error, Result};
use crate::hilbert::{Axis, Outcome, Party, SpinState};
use crate::scattering::{two_impurity_exact, OperatorAmplitudes, TwoImpurityGeometry, WaveNumber};

/// Register `[particle-2, particle-1, impurity-0]` for two particles and one impurity.
pub const PARTICLES_REGISTER: [Party; 3] = [Party::Particle(2), Party::Particle(1), Party::Impurity(0)];
/// Register `[particle-0, impurity-1, impurity-2]` for one particle and two impurities.
pub const IMPURITIES_REGISTER: [Party; 3] = [Party::Particle(0), Party::Impurity(1), Party::Impurity(2)];

/// `|0>_2 |0>_1 |1>_0`: the impurity polarized opposite to both particles.
pub fn default_particles_initial() -> SpinState {
    SpinState::basis(&[0, 0, 1], PARTICLES_REGISTER.to_vec()).expect("basis ket")
}

/// `|1>_0 |0>_1 |0>_2`.
pub fn default_impurities_initial() -> SpinState {
    SpinState::basis(&[1, 0, 0], IMPURITIES_REGISTER.to_vec()).expect("basis ket")
}

fn check_register(initial: &SpinState) -> Result<()> {
    if initial.num_qubits() != 3 {
        return Err(Error::BadQubits(format!("protocol needs a 3-qubit register, got {}", initial.num_qubits())));
    }
    Ok(())
}

fn transmitted_outcomes(tree: &EventTree, cut: &[usize]) -> Result<Vec<ProtocolOutcome>> {
    Outcome::BOTH
        .iter()
        .map(|&o| {
            let br = tree
                .find(|b| b.all_transmitted() && b.measurement().map(|m| m.2) == Some(o))
                .ok_or_else(|| Error::Internal("missing fully transmitted branch".into()))?;
            ProtocolOutcome::from_branch(br, tree, cut)
        })
        .collect()
}

/// Particles 1 and 2 scatter one after the other off the same Kondo
/// impurity, which is then measured along `measure_axis`.
///
/// Outcomes are the branches where both particles were transmitted, for
/// each measurement result (`|0>` first). Reflected branches stay in the
/// event tree, so its probabilities sum to one.
pub fn entangle_particles(
    k: WaveNumber,
    spec: &KondoImpuritySpec,
    initial: &SpinState,
    measure_axis: Axis,
) -> Result<ProtocolRun> {
    check_register(initial)?;
    let ch = kondo_operators(spec, k)?;
    let first = embed_channel(&ch, 3, &[1, 2])?;
    let second = embed_channel(&ch, 3, &[0, 2])?;
    let (p1, p2, imp) = (initial.labels()[1], initial.labels()[0], initial.labels()[2]);
    let tree = EventTree::new(initial.clone())?
        .scatter(&first, p1, Some(imp), |_| true)?
        .scatter(&second, p2, Some(imp), |_| true)?
        .measure(2, measure_axis)?;
    let outcomes = transmitted_outcomes(&tree, &[0])?;
    Ok(ProtocolRun { outcomes, tree, condition_residual: None })
}

/// How the two-impurity transmission is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Sequential transmissions, reflections between impurities neglected.
    FirstOrder,
    /// Full multiple-scattering solution.
    Exact,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-order" => Ok(Mode::FirstOrder),
            "exact" => Ok(Mode::Exact),
            _ => Err(Error::Precondition(format!("unknown mode '{s}' (first-order | exact)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::FirstOrder => "first-order",
            Mode::Exact => "exact",
        })
    }
}

/// A particle passes impurity 1 at `-a` and impurity 2 at `+a`, then is
/// measured along `measure_axis`.
///
/// `half_separation` is only used in exact mode. In first-order mode a
/// particle reflected by impurity 1 never reaches impurity 2.
pub fn entangle_impurities(
    k: WaveNumber,
    specs: [&KondoImpuritySpec; 2],
    half_separation: f64,
    initial: &SpinState,
    mode: Mode,
    measure_axis: Axis,
) -> Result<ProtocolRun> {
    check_register(initial)?;
    let particle = initial.labels()[0];
    let (imp1, imp2) = (initial.labels()[1], initial.labels()[2]);
    let tree = EventTree::new(initial.clone())?;
    let tree = match mode {
        Mode::FirstOrder => {
            let c1 = embed_channel(&kondo_operators(specs[0], k)?, 3, &[0, 1])?;
            let c2 = embed_channel(&kondo_operators(specs[1], k)?, 3, &[0, 2])?;
            tree.scatter(&c1, particle, Some(imp1), |_| true)?.scatter(
                &c2,
                particle,
                Some(imp2),
                Branch::all_transmitted,
            )?
        }
        Mode::Exact => {
            let geom = TwoImpurityGeometry::new(
                half_separation,
                k,
                embed(&specs[0].potential(), 3, &[0, 1])?,
                embed(&specs[1].potential(), 3, &[0, 2])?,
            )?;
            let exact = two_impurity_exact(&geom)?;
            let ch = OperatorAmplitudes { t: exact.t, r: exact.r };
            tree.scatter(&ch, particle, None, |_| true)?
        }
    };
    let tree = tree.measure(0, measure_axis)?;
    let outcomes = transmitted_outcomes(&tree, &[0])?;
    Ok(ProtocolRun { outcomes, tree, condition_residual: None })
}

/// Labels on every scattering step of the headline branch.
pub fn scattering_steps(branch: &Branch) -> impl Iterator<Item = &Step> {
    branch.path.iter().filter(|s| matches!(s, Step::Scattered { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::C64;

    fn k1() -> WaveNumber {
        WaveNumber::new(1.0).unwrap()
    }

    #[test]
    fn eq18_amplitudes_at_r_equals_k() {
        let spec = KondoImpuritySpec::paper(1.0).unwrap();
        let run = entangle_particles(k1(), &spec, &default_particles_initial(), Axis::Z).unwrap();
        let out = run.primary();
        assert!(out.label.ends_with("impurity-0 measured |0>"));
        let post = out.post_state.as_ref().unwrap();
        // post register is [particle-2, particle-1]
        assert!((post.amplitude(0b10).norm_sqr() - 4.0 / 9.0).abs() < 1e-12);
        assert!((post.amplitude(0b01).norm_sqr() - 5.0 / 9.0).abs() < 1e-12);
        // unconditional weight |AB|^2 + |S1 B|^2 = 0.08 + 0.1
        assert!((out.probability - 0.18).abs() < 1e-12);
        assert!((run.tree.total_probability() - 1.0).abs() < 1e-12);
        assert_eq!(run.tree.branches.len(), 8);
    }

    #[test]
    fn zero_coupling_keeps_impurity_flipped() {
        let spec = KondoImpuritySpec::paper(0.0).unwrap();
        let run = entangle_particles(k1(), &spec, &default_particles_initial(), Axis::Z).unwrap();
        assert_eq!(run.outcomes[0].probability, 0.0);
        assert_eq!(run.outcomes[1].probability, 1.0);
        assert_eq!(run.outcomes[1].entropy_bits, 0.0);
    }

    #[test]
    fn aligned_spins_never_entangle() {
        let spec = KondoImpuritySpec::paper(0.9).unwrap();
        let all_up = SpinState::basis(&[0, 0, 0], PARTICLES_REGISTER.to_vec()).unwrap();
        let run = entangle_particles(k1(), &spec, &all_up, Axis::Z).unwrap();
        for b in &run.tree.branches {
            let o = ProtocolOutcome::from_branch(b, &run.tree, &[0]).unwrap();
            assert!(o.entropy_bits < 1e-12, "{}", o.label);
        }
    }

    #[test]
    fn rejects_two_qubit_register() {
        let spec = KondoImpuritySpec::paper(1.0).unwrap();
        let two = SpinState::basis(&[0, 1], vec![Party::Particle(1), Party::Impurity(0)]).unwrap();
        assert!(matches!(entangle_particles(k1(), &spec, &two, Axis::Z), Err(Error::BadQubits(_))));
    }

    #[test]
    fn eq20_first_order_amplitudes() {
        let spec = KondoImpuritySpec::paper(1.0).unwrap();
        let run =
            entangle_impurities(k1(), [&spec, &spec], 1.0, &default_impurities_initial(), Mode::FirstOrder, Axis::Z)
                .unwrap();
        let [s1, _, s3, s4] = spec.channel_amplitudes(k1()).map(|a| a.s);
        let plus = (s3 + s4) / 2.0;
        let minus = (s3 - s4) / 2.0;
        // [impurity-1, impurity-2]: |10> <- S1 B, |01> <- A B
        let u10 = s1 * minus;
        let u01 = plus * minus;
        let norm = (u10.norm_sqr() + u01.norm_sqr()).sqrt();
        let post = run.primary().post_state.clone().unwrap();
        let phase = post.amplitude(0b10) / (u10 / norm);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((post.amplitude(0b10) - phase * u10 / norm).norm() < 1e-12);
        assert!((post.amplitude(0b01) - phase * u01 / norm).norm() < 1e-12);
        assert!((run.primary().probability - norm * norm).abs() < 1e-12);
        // reflected at impurity 1, or transmitted then T/R at impurity 2, times two outcomes
        assert_eq!(run.tree.branches.len(), 6);
        assert!((run.tree.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_impurities_stay_unentangled() {
        let spec = KondoImpuritySpec::paper(0.0).unwrap();
        for mode in [Mode::FirstOrder, Mode::Exact] {
            let run =
                entangle_impurities(k1(), [&spec, &spec], 2.0, &default_impurities_initial(), mode, Axis::Z).unwrap();
            assert_eq!(run.outcomes[0].probability, 0.0);
            assert!((run.outcomes[1].probability - 1.0).abs() < 1e-15);
            assert_eq!(run.outcomes[1].entropy_bits, 0.0);
        }
    }

    #[test]
    fn exact_mode_needs_positive_separation() {
        let spec = KondoImpuritySpec::paper(0.5).unwrap();
        let res = entangle_impurities(k1(), [&spec, &spec], 0.0, &default_impurities_initial(), Mode::Exact, Axis::Z);
        assert!(matches!(res, Err(Error::BadSeparation(_))));
        // first-order ignores it
        assert!(entangle_impurities(
            k1(),
            [&spec, &spec],
            0.0,
            &default_impurities_initial(),
            Mode::FirstOrder,
            Axis::Z
        )
        .is_ok());
    }

    #[test]
    fn exact_and_first_order_agree_at_weak_coupling() {
        let spec = KondoImpuritySpec::paper(0.01).unwrap();
        let init = default_impurities_initial();
        let a = entangle_impurities(k1(), [&spec, &spec], 5.0, &init, Mode::FirstOrder, Axis::Z).unwrap();
        let b = entangle_impurities(k1(), [&spec, &spec], 5.0, &init, Mode::Exact, Axis::Z).unwrap();
        let fa = a.primary().post_state.as_ref().unwrap();
        let fb = b.primary().post_state.as_ref().unwrap();
        assert!(fa.fidelity(fb).unwrap() >= 1.0 - 1e-3);
        let _ = C64::new(0.0, 0.0);
    }

    #[test]
    fn mode_parse() {
        assert_eq!("exact".parse::<Mode>().unwrap(), Mode::Exact);
        assert_eq!(Mode::FirstOrder.to_string(), "first-order");
        assert!("second-order".parse::<Mode>().is_err());
    }
}
