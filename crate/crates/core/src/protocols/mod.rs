//! Post-selection protocols built from the impurity channels.
//!
//! Every protocol enumerates its full event tree of transmissions,
//! reflections and measurement outcomes. Probabilities are absolute, i.e.
//! relative to the normalized initial state.

pub mod concentrate;
pub mod entangle;
pub mod outcome;
pub mod sweep;
pub mod tree;

pub use concentrate::{concentrate_fixed, concentrate_kondo, optimal_coupling_fixed, optimal_coupling_kondo};
pub use entangle::{
    default_impurities_initial, default_particles_initial, entangle_impurities, entangle_particles, Mode,
};
pub use outcome::{ProtocolOutcome, ProtocolRun};
pub use sweep::{sweep, GridScale, GridSpec, Objective, ProtocolKind, ProtocolParams, SweepRecord, SweepResult};
pub use tree::{Branch, EventTree, Step};

use crate::channels::KondoImpuritySpec;
use crate::error::Result;
use crate::hilbert::{Axis, SpinState, C64};
use crate::scattering::WaveNumber;

/// A fully specified protocol invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    ConcentrateFixed {
        a: C64,
        b: C64,
        k: WaveNumber,
        r: f64,
        axis: Axis,
    },
    ConcentrateKondo {
        a: C64,
        b: C64,
        k: WaveNumber,
        spec: KondoImpuritySpec,
        measure_axis: Axis,
    },
    EntangleParticles {
        k: WaveNumber,
        spec: KondoImpuritySpec,
        initial: SpinState,
        measure_axis: Axis,
    },
    EntangleImpurities {
        k: WaveNumber,
        specs: [KondoImpuritySpec; 2],
        half_separation: f64,
        initial: SpinState,
        mode: Mode,
        measure_axis: Axis,
    },
}

impl Protocol {
    pub fn run(&self) -> Result<ProtocolRun> {
        match self {
            Protocol::ConcentrateFixed { a, b, k, r, axis } => concentrate_fixed(*a, *b, *k, *r, *axis),
            Protocol::ConcentrateKondo { a, b, k, spec, measure_axis } => {
                concentrate_kondo(*a, *b, *k, spec, *measure_axis)
            }
            Protocol::EntangleParticles { k, spec, initial, measure_axis } => {
                entangle_particles(*k, spec, initial, *measure_axis)
            }
            Protocol::EntangleImpurities { k, specs, half_separation, initial, mode, measure_axis } => {
                entangle_impurities(*k, [&specs[0], &specs[1]], *half_separation, initial, *mode, *measure_axis)
            }
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::ConcentrateFixed { .. } => ProtocolKind::Concentrate,
            Protocol::ConcentrateKondo { .. } => ProtocolKind::ConcentrateKondo,
            Protocol::EntangleParticles { .. } => ProtocolKind::EntangleParticles,
            Protocol::EntangleImpurities { .. } => ProtocolKind::EntangleImpurities,
        }
    }

    pub fn event_tree(&self) -> Result<EventTree> {
        Ok(self.run()?.tree)
    }
}

/// Complete branch enumeration of one invocation.
pub fn event_tree(protocol: &Protocol) -> Result<EventTree> {
    protocol.event_tree()
}
