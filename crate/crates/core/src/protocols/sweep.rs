//! Grid sweeps over protocol parameters.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::concentrate::{optimal_coupling_fixed, optimal_coupling_kondo};
use super::entangle::{default_impurities_initial, default_particles_initial, Mode};
use super::Protocol;
use crate::channels::{KondoEigenvalues, KondoImpuritySpec};
use crate::error::{Error, Result};
use crate::hilbert::{Axis, SpinState, C64};
use crate::scattering::WaveNumber;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Fixed-impurity filter.
    Concentrate,
    ConcentrateKondo,
    EntangleParticles,
    EntangleImpurities,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Concentrate,
        ProtocolKind::ConcentrateKondo,
        ProtocolKind::EntangleParticles,
        ProtocolKind::EntangleImpurities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Concentrate => "concentrate",
            ProtocolKind::ConcentrateKondo => "concentrate-kondo",
            ProtocolKind::EntangleParticles => "entangle-particles",
            ProtocolKind::EntangleImpurities => "entangle-impurities",
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
            Error::Precondition(format!("unknown protocol '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

/// `param:start:stop:points[:log]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn new(param: &str, start: f64, stop: f64, points: usize, scale: GridScale) -> Result<Self> {
        if !SWEEPABLE.contains(&param) {
            return Err(Error::Precondition(format!("cannot sweep '{param}' (sweepable: {})", SWEEPABLE.join(", "))));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::Precondition(format!("grid bounds for '{param}' must be finite")));
        }
        if points == 0 {
            return Err(Error::Precondition(format!("grid for '{param}' needs at least one point")));
        }
        if points > 1 && start >= stop {
            return Err(Error::Precondition(format!("grid for '{param}' needs start < stop")));
        }
        if scale == GridScale::Log && start <= 0.0 {
            return Err(Error::Precondition(format!("log grid for '{param}' needs start > 0")));
        }
        Ok(Self { param: param.to_string(), start, stop, points, scale })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    GridScale::Linear => self.start + t * (self.stop - self.start),
                    GridScale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("malformed grid '{s}' (expected param:start:stop:points[:log])"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        let points = parts[3].trim().parse::<usize>().map_err(|_| bad())?;
        let scale = match parts.get(4).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => GridScale::Linear,
            Some("log") => GridScale::Log,
            Some(_) => return Err(bad()),
        };
        GridSpec::new(parts[0].trim(), num(parts[1])?, num(parts[2])?, points, scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Probability,
    Entropy,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(Objective::Probability),
            "entropy" => Ok(Objective::Entropy),
            _ => Err(Error::Precondition(format!("unknown objective '{s}' (probability | entropy)"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Probability => "probability",
            Objective::Entropy => "entropy",
        })
    }
}

/// Parameters a grid may vary.
pub const SWEEPABLE: [&str; 9] = ["k", "r", "xi", "r1", "r2", "a", "half-separation", "theta", "phi"];

/// Loose parameter set from which any protocol can be assembled.
///
/// Unset values fall back to defaults: `k = 1`, `a = sqrt(1/3)`,
/// `b = sqrt(1 - a^2)`, `half-separation = 1`, z axis. The coupling `r`
/// defaults to the optimum for the concentration protocols and to `k` for
/// the others. `xi` sets `r` through the dimensionless ratio of the
/// relevant channel: `2r/k` for the fixed filter, `r/k` for Kondo.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProtocolParams {
    pub k: Option<f64>,
    pub r: Option<f64>,
    pub xi: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub a_phase: f64,
    pub b_phase: f64,
    pub half_separation: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub axis: Option<Axis>,
    pub eigenvalues: KondoEigenvalues,
    pub mode: Option<Mode>,
    pub initial: Option<String>,
}

impl ProtocolParams {
    /// Sets one sweepable parameter. Setting `r` clears `xi` and vice versa.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Precondition(format!("{name} must be finite")));
        }
        match name {
            "k" => self.k = Some(value),
            "r" => {
                self.r = Some(value);
                self.xi = None;
            }
            "xi" => {
                self.xi = Some(value);
                self.r = None;
            }
            "r1" => self.r1 = Some(value),
            "r2" => self.r2 = Some(value),
            "a" => self.a = Some(value),
            "half-separation" => self.half_separation = Some(value),
            "theta" => self.theta = Some(value),
            "phi" => self.phi = Some(value),
            _ => return Err(Error::Precondition(format!("unknown parameter '{name}'"))),
        }
        Ok(())
    }

    fn wave_number(&self) -> Result<WaveNumber> {
        let k = self.k.unwrap_or(1.0);
        if k.is_nan() || k <= 0.0 {
            return Err(Error::Precondition("k must be positive".into()));
        }
        WaveNumber::new(k)
    }

    fn coefficients(&self) -> Result<(C64, C64)> {
        let a = self.a.unwrap_or((1.0f64 / 3.0).sqrt());
        if !(0.0..=1.0).contains(&a) && self.b.is_none() {
            return Err(Error::Precondition(format!("a = {a} must lie in [0, 1] when b is implied")));
        }
        let b = self.b.unwrap_or_else(|| (1.0 - a * a).max(0.0).sqrt());
        Ok((C64::from_polar(a, self.a_phase), C64::from_polar(b, self.b_phase)))
    }

    fn axis(&self) -> Result<Axis> {
        match (self.theta, self.phi) {
            (None, None) => Ok(self.axis.unwrap_or(Axis::Z)),
            (t, p) => {
                let base = self.axis.unwrap_or(Axis::Z).components();
                let theta0 = base[2].clamp(-1.0, 1.0).acos();
                let phi0 = base[1].atan2(base[0]);
                Axis::from_angles(t.unwrap_or(theta0), p.unwrap_or(phi0))
            }
        }
    }

    fn initial(&self, default: SpinState) -> Result<SpinState> {
        match &self.initial {
            None => Ok(default),
            Some(bits) => SpinState::from_bitstring(bits, default.labels().to_vec()),
        }
    }

    fn kondo_r(&self, k: WaveNumber, explicit: Option<f64>) -> Option<f64> {
        explicit.or(self.r).or(self.xi.map(|xi| xi * k.get()))
    }

    pub fn build(&self, kind: ProtocolKind) -> Result<Protocol> {
        let k = self.wave_number()?;
        let axis = self.axis()?;
        let ev = self.eigenvalues;
        Ok(match kind {
            ProtocolKind::Concentrate => {
                let (a, b) = self.coefficients()?;
                let r = match (self.r, self.xi) {
                    (Some(r), _) => r,
                    (None, Some(xi)) => xi * k.get() / 2.0,
                    (None, None) => optimal_coupling_fixed(a, b, k)?,
                };
                Protocol::ConcentrateFixed { a, b, k, r, axis }
            }
            ProtocolKind::ConcentrateKondo => {
                let (a, b) = self.coefficients()?;
                let r = match self.kondo_r(k, None) {
                    Some(r) => r,
                    None => optimal_coupling_kondo(a, b, k, &KondoImpuritySpec::new(0.0, ev)?)?,
                };
                Protocol::ConcentrateKondo { a, b, k, spec: KondoImpuritySpec::new(r, ev)?, measure_axis: axis }
            }
            ProtocolKind::EntangleParticles => {
                let r = self.kondo_r(k, None).unwrap_or(k.get());
                Protocol::EntangleParticles {
                    k,
                    spec: KondoImpuritySpec::new(r, ev)?,
                    initial: self.initial(default_particles_initial())?,
                    measure_axis: axis,
                }
            }
            ProtocolKind::EntangleImpurities => {
                let r1 = self.kondo_r(k, self.r1).unwrap_or(k.get());
                let r2 = self.kondo_r(k, self.r2).unwrap_or(k.get());
                Protocol::EntangleImpurities {
                    k,
                    specs: [KondoImpuritySpec::new(r1, ev)?, KondoImpuritySpec::new(r2, ev)?],
                    half_separation: self.half_separation.unwrap_or(1.0),
                    initial: self.initial(default_impurities_initial())?,
                    mode: self.mode.unwrap_or(Mode::FirstOrder),
                    measure_axis: axis,
                }
            }
        })
    }
}

/// One grid point: swept values in grid order, then the headline outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub params: Vec<(String, f64)>,
    pub probability: f64,
    pub entropy_bits: f64,
    pub concurrence: Option<f64>,
}

impl SweepRecord {
    pub fn score(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Probability => self.probability,
            Objective::Entropy => self.entropy_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub protocol: ProtocolKind,
    pub objective: Objective,
    pub records: Vec<SweepRecord>,
    /// Index of the first record attaining the maximum objective.
    pub argmax: Option<usize>,
}

impl SweepResult {
    pub fn best(&self) -> Option<&SweepRecord> {
        self.argmax.map(|i| &self.records[i])
    }
}

/// Evaluates `kind` at every point of the cartesian product of `grids`
/// (first grid outermost). Points run in parallel; records come back in
/// grid order.
pub fn sweep(
    kind: ProtocolKind,
    grids: &[GridSpec],
    fixed: &ProtocolParams,
    objective: Objective,
) -> Result<SweepResult> {
    if grids.is_empty() {
        return Err(Error::Precondition("sweep needs at least one grid".into()));
    }
    for (i, g) in grids.iter().enumerate() {
        if grids[..i].iter().any(|h| h.param == g.param) {
            return Err(Error::Precondition(format!("parameter '{}' swept twice", g.param)));
        }
    }
    let axes: Vec<Vec<f64>> = grids.iter().map(GridSpec::values).collect();
    let total: usize = axes.iter().map(Vec::len).product();

    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut idx = vec![0; axes.len()];
            for (d, ax) in axes.iter().enumerate().rev() {
                idx[d] = flat % ax.len();
                flat /= ax.len();
            }
            idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect()
        })
        .collect();

    let records = points
        .par_iter()
        .map(|vals| {
            let mut params = fixed.clone();
            for (g, &v) in grids.iter().zip(vals) {
                params.set(&g.param, v)?;
            }
            let run = params.build(kind)?.run()?;
            let out = run.primary();
            Ok(SweepRecord {
                params: grids.iter().map(|g| g.param.clone()).zip(vals.iter().copied()).collect(),
                probability: out.probability,
                entropy_bits: out.entropy_bits,
                concurrence: out.concurrence,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut argmax: Option<usize> = None;
    for (i, rec) in records.iter().enumerate() {
        if argmax.is_none_or(|j| rec.score(objective) > records[j].score(objective)) {
            argmax = Some(i);
        }
    }
    Ok(SweepResult { protocol: kind, objective, records, argmax })
}
