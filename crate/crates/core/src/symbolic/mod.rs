//! Thresholding into predicates and propositional forward chaining.

mod chain;
mod kb;
mod threshold;

pub use chain::{bind_predicates, detect_conflicts, format_traces, forward_chain, Closure, ProofStep, ProofTrace};
pub use kb::{AtomId, Clause, KnowledgeBase};
pub use threshold::{hard_threshold, sigmoid, soft_threshold, PredicateSet, Tau, ThresholdConfig, ThresholdMode};
