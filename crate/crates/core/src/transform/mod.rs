//! Proof transformations: resolution into CR and the splitting combinator.

mod simulate;
mod split;

pub use simulate::{resolution_to_cr, simulation_metrics, Gadget, GadgetKind, Simulation, SimulationMetrics};
pub use split::{combine_split_refutations, split_components};

use crate::cr::CrError;
use crate::Violation;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("source derivation does not check: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Unchecked(Vec<Violation>),
    #[error("components {0} and {1} share variables")]
    NotDisjoint(usize, usize),
    #[error("proof {0} is not a CR refutation")]
    NotRefutation(usize),
    #[error("{components} components but {proofs} proofs")]
    ComponentMismatch { components: usize, proofs: usize },
    #[error(transparent)]
    Kernel(#[from] CrError),
    #[error("{what}: expected {expected}, found {found}")]
    MetricMismatch { what: &'static str, expected: usize, found: usize },
}
