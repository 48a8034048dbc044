use super::tree::{Branch, EventTree};
use crate::error::Result;
use crate::hilbert::{collapse, concurrence, entanglement_entropy, SpinState};
use crate::tolerance::TOL;

/// Post-selected result of one protocol branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub label: String,
    /// Normalized state of the unmeasured qubits; `None` when the branch
    /// has vanishing weight.
    pub post_state: Option<SpinState>,
    /// Probability relative to the initial normalized state.
    pub probability: f64,
    /// Probability of the final measurement outcome given the scattering
    /// events on the branch (1 when nothing is measured).
    pub conditional_probability: f64,
    /// Entanglement between the two remaining parties, in bits.
    pub entropy_bits: f64,
    pub concurrence: Option<f64>,
}

impl ProtocolOutcome {
    /// Entanglement is scored across `cut` of the post-selected register,
    /// after the measured qubit (if any) has been removed.
    pub(crate) fn from_branch(branch: &Branch, tree: &EventTree, cut: &[usize]) -> Result<Self> {
        let reduced = match branch.measurement() {
            Some((party, axis, outcome)) => {
                let q = branch.state.index_of(party).expect("measured party belongs to the register");
                collapse(&branch.state, q, axis, outcome)?
            }
            None => branch.state.clone(),
        };
        let scatter_p = branch.scattering_probability(tree);
        let conditional_probability = if branch.measurement().is_none() {
            1.0
        } else if scatter_p > TOL.vanishing {
            branch.probability / scatter_p
        } else {
            0.0
        };

        let (post_state, entropy_bits, conc) = if branch.probability > TOL.vanishing {
            let post = reduced.normalized()?;
            let entropy = entanglement_entropy(&post, cut)?;
            let conc = if post.num_qubits() == 2 { Some(concurrence(&post)?) } else { None };
            (Some(post), entropy, conc)
        } else {
            (None, 0.0, (reduced.num_qubits() == 2).then_some(0.0))
        };

        Ok(Self {
            label: branch.label(),
            post_state,
            probability: branch.probability,
            conditional_probability,
            entropy_bits,
            concurrence: conc,
        })
    }

    /// Mean number of attempts until this branch occurs.
    pub fn expected_attempts(&self) -> f64 {
        if self.probability > 0.0 {
            1.0 / self.probability
        } else {
            f64::INFINITY
        }
    }
}

/// Everything a protocol evaluation produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    /// The post-selected branches of interest, the headline one first.
    pub outcomes: Vec<ProtocolOutcome>,
    pub tree: EventTree,
    /// `| |a S1| - |b (S3+S4)/2| |` for Kondo concentration.
    pub condition_residual: Option<f64>,
}

impl ProtocolRun {
    pub fn primary(&self) -> &ProtocolOutcome {
        &self.outcomes[0]
    }
}
