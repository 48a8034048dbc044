use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{project, Axis, Outcome, Party, SpinState};
use crate::scattering::OperatorAmplitudes;
use crate::tolerance::TOL;

/// One event along a branch of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// `particle` met `impurity` and was transmitted or reflected. An
    /// impurity of `None` stands for the whole two-impurity system.
    Scattered {
        particle: Party,
        impurity: Option<Party>,
        transmitted: bool,
    },
    Measured {
        party: Party,
        axis: Axis,
        outcome: Outcome,
    },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Scattered { particle, impurity, transmitted } => {
                let verb = if *transmitted { "transmitted" } else { "reflected" };
                match impurity {
                    Some(imp) => write!(f, "{particle} {verb} at {imp}"),
                    None => write!(f, "{particle} {verb} by both impurities"),
                }
            }
            Step::Measured { party, axis, outcome } => {
                let ket = if *axis == Axis::Z {
                    format!("|{}>", outcome.z_bit())
                } else {
                    let sign = if *outcome == Outcome::Plus { '+' } else { '-' };
                    format!("{sign}[{axis}]")
                };
                write!(f, "{party} measured {ket}")
            }
        }
    }
}

/// A leaf of the event tree: the unnormalized register state after the
/// events on `path`, and its probability relative to the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub path: Vec<Step>,
    pub state: SpinState,
    pub probability: f64,
}

impl Branch {
    pub fn label(&self) -> String {
        if self.path.is_empty() {
            return "initial".to_string();
        }
        self.path.iter().map(Step::to_string).collect::<Vec<_>>().join(", ")
    }

    /// True if every scattering on the path was a transmission.
    pub fn all_transmitted(&self) -> bool {
        self.path.iter().all(|s| match s {
            Step::Scattered { transmitted, .. } => *transmitted,
            Step::Measured { .. } => true,
        })
    }

    /// Probability of the scattering events alone, before any measurement.
    pub fn scattering_probability(&self, tree: &EventTree) -> f64 {
        let prefix: Vec<&Step> = self.path.iter().filter(|s| matches!(s, Step::Scattered { .. })).collect();
        tree.branches
            .iter()
            .filter(|b| {
                let p: Vec<&Step> = b.path.iter().filter(|s| matches!(s, Step::Scattered { .. })).collect();
                p == prefix
            })
            .map(|b| b.probability)
            .sum()
    }

    pub fn measurement(&self) -> Option<(Party, Axis, Outcome)> {
        self.path.iter().rev().find_map(|s| match s {
            Step::Measured { party, axis, outcome } => Some((*party, *axis, *outcome)),
            _ => None,
        })
    }
}

/// Complete enumeration of transmit/reflect and measurement branches.
///
/// Reflected branches of a repeat-until-success protocol appear here as
/// per-attempt probabilities; nothing is sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTree {
    pub branches: Vec<Branch>,
    initial_norm_sqr: f64,
}

impl EventTree {
    pub fn new(initial: SpinState) -> Result<Self> {
        let n2 = initial.norm_sqr();
        if (n2 - 1.0).abs() > TOL.normalization {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { branches: vec![Branch { path: Vec::new(), state: initial, probability: 1.0 }], initial_norm_sqr: n2 })
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    fn weight(&self, s: &SpinState) -> f64 {
        s.norm_sqr() / self.initial_norm_sqr
    }

    /// Splits every branch accepted by `when` into a transmitted and a
    /// reflected child using the (already embedded) channel.
    pub fn scatter(
        mut self,
        channel: &OperatorAmplitudes,
        particle: Party,
        impurity: Option<Party>,
        when: impl Fn(&Branch) -> bool,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(self.branches.len() * 2);
        for b in std::mem::take(&mut self.branches) {
            if !when(&b) {
                out.push(b);
                continue;
            }
            for (op, transmitted) in [(&channel.t, true), (&channel.r, false)] {
                let state = b.state.apply(op)?;
                let mut path = b.path.clone();
                path.push(Step::Scattered { particle, impurity, transmitted });
                out.push(Branch { probability: self.weight(&state), path, state });
            }
        }
        self.branches = out;
        Ok(self)
    }

    /// Splits every branch by the outcome of measuring `qubit` along `axis`.
    pub fn measure(mut self, qubit: usize, axis: Axis) -> Result<Self> {
        let mut out = Vec::with_capacity(self.branches.len() * 2);
        for b in std::mem::take(&mut self.branches) {
            let party =
                *b.state.labels().get(qubit).ok_or_else(|| Error::BadQubits(format!("no qubit {qubit} to measure")))?;
            for outcome in Outcome::BOTH {
                let (state, _) = project(&b.state, qubit, axis, outcome)?;
                let mut path = b.path.clone();
                path.push(Step::Measured { party, axis, outcome });
                out.push(Branch { probability: self.weight(&state), path, state });
            }
        }
        self.branches = out;
        Ok(self)
    }

    pub fn find(&self, pred: impl Fn(&Branch) -> bool) -> Option<&Branch> {
        self.branches.iter().find(|b| pred(b))
    }
}
