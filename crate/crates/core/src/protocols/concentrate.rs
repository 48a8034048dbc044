//! Entanglement concentration of `a|00> + b|11>` by filtering one particle.

use super::outcome::{ProtocolOutcome, ProtocolRun};
use super::tree::{Branch, EventTree, Step};
use crate::channels::{embed_channel, fixed_filter_operators, kondo_operators, FixedImpuritySpec, KondoImpuritySpec};
use crate::error::{Error, Result};
use crate::hilbert::{Axis, Outcome, Party, SpinState, C64};
use crate::scattering::{ScalarAmplitudes, WaveNumber};
use crate::tolerance::TOL;

const PAIR: [Party; 2] = [Party::Particle(2), Party::Particle(1)];

fn check_pair(a: C64, b: C64) -> Result<()> {
    let n2 = a.norm_sqr() + b.norm_sqr();
    if !n2.is_finite() || (n2 - 1.0).abs() > TOL.normalization {
        return Err(Error::NotNormalized(n2));
    }
    Ok(())
}

fn schmidt_pair(a: C64, b: C64) -> Result<SpinState> {
    let o = C64::new(0.0, 0.0);
    SpinState::new(vec![a, o, o, b], PAIR.to_vec())
}

fn is_transmitted(b: &Branch) -> bool {
    b.path.iter().any(|s| matches!(s, Step::Scattered { transmitted: true, .. }))
}

/// Particle 1 of `a|00> + b|11>` scatters off a fixed impurity.
///
/// The transmitted branch carries `a|00> + b S|11>` with probability
/// `|a|^2 + |b|^2 |S|^2` (for the default +z axis).
pub fn concentrate_fixed(a: C64, b: C64, k: WaveNumber, r: f64, axis: Axis) -> Result<ProtocolRun> {
    check_pair(a, b)?;
    let spec = FixedImpuritySpec::new(r, axis)?;
    let filter = embed_channel(&fixed_filter_operators(&spec, k)?, 2, &[1])?;
    let tree =
        EventTree::new(schmidt_pair(a, b)?)?
            .scatter(&filter, Party::Particle(1), Some(Party::Impurity(0)), |_| true)?;
    let outcomes =
        tree.branches.iter().map(|br| ProtocolOutcome::from_branch(br, &tree, &[0])).collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun { outcomes, tree, condition_residual: None })
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Coupling that makes the transmitted pair maximally entangled along +z:
/// `|S| = |a/b|`, i.e. `xi = 2r/k = sqrt(|b/a|^2 - 1)`.
///
/// Requires `0 < |a| < |b|`; otherwise swap the roles of the two terms.
pub fn optimal_coupling_fixed(a: C64, b: C64, k: WaveNumber) -> Result<f64> {
    let (a, b) = (a.norm(), b.norm());
    if !(a > 0.0 && a < b) {
        return Err(Error::Precondition(format!(
            "optimal fixed coupling needs 0 < |a| < |b|, got |a| = {a}, |b| = {b}"
        )));
    }
    let target = a / b;
    let xi = ((b / a).powi(2) - 1.0).sqrt();
    let r = xi * k.get() / 2.0;

    // cross-check against a direct root find on |S(r)| - |a/b|
    let f = |r: f64| ScalarAmplitudes::from_xi(2.0 * r / k.get()).s.norm() - target;
    let mut hi = k.get();
    while f(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Internal("fixed coupling root not bracketed".into()));
        }
    }
    let root = bisect(f, 0.0, hi);
    if (root - r).abs() > 1e-8 * r.max(1.0) {
        return Err(Error::Internal(format!("closed-form coupling {r} disagrees with root find {root}")));
    }
    Ok(r)
}

/// `|a S1| - |b (S3 + S4)/2|` at coupling `r`.
fn kondo_balance(a: f64, b: f64, r: f64, k: WaveNumber, spec: &KondoImpuritySpec) -> f64 {
    let probe = KondoImpuritySpec { r, ..*spec };
    let [s1, _, s3, s4] = probe.channel_amplitudes(k).map(|c| c.s);
    a * s1.norm() - b * ((s3 + s4) / 2.0).norm()
}

/// Particle 1 of `a|00> + b|11>` scatters off a Kondo impurity prepared in
/// `|0>`, after which the impurity is measured along `measure_axis`.
///
/// Outcomes are the transmitted branches for both measurement results,
/// outcome `|0>` (or `+`) first.
pub fn concentrate_kondo(
    a: C64,
    b: C64,
    k: WaveNumber,
    spec: &KondoImpuritySpec,
    measure_axis: Axis,
) -> Result<ProtocolRun> {
    check_pair(a, b)?;
    let impurity = SpinState::basis(&[0], vec![Party::Impurity(0)])?;
    let initial = schmidt_pair(a, b)?.tensor(&impurity)?;
    let channel = embed_channel(&kondo_operators(spec, k)?, 3, &[1, 2])?;
    let tree = EventTree::new(initial)?
        .scatter(&channel, Party::Particle(1), Some(Party::Impurity(0)), |_| true)?
        .measure(2, measure_axis)?;
    let outcomes = Outcome::BOTH
        .iter()
        .map(|&o| {
            let br = tree
                .find(|br| is_transmitted(br) && br.measurement().map(|m| m.2) == Some(o))
                .expect("transmitted branch exists for each outcome");
            ProtocolOutcome::from_branch(br, &tree, &[0])
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = kondo_balance(a.norm(), b.norm(), spec.r, k, spec).abs();
    Ok(ProtocolRun { outcomes, tree, condition_residual: Some(residual) })
}

/// Smallest positive coupling with `|a S1| = |b (S3+S4)/2|`, found by a
/// geometric scan followed by bisection.
pub fn optimal_coupling_kondo(a: C64, b: C64, k: WaveNumber, spec: &KondoImpuritySpec) -> Result<f64> {
    check_pair(a, b)?;
    let (a, b) = (a.norm(), b.norm());
    let f = |r: f64| kondo_balance(a, b, r, k, spec);
    let f0 = f(0.0);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut r = 1e-4 * k.get();
    while r < 1e8 * k.get() {
        if (f(r) > 0.0) != (f0 > 0.0) {
            return Ok(bisect(f, lo, r));
        }
        lo = r;
        r *= 1.25;
    }
    Err(Error::NoSolution(format!(
        "|a S1| never meets |b (S3+S4)/2| for |a| = {a}, |b| = {b} with eigenvalues {}",
        spec.eigenvalues
    )))
}
