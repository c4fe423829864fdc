//! Linear logical graphs: crisp and fuzzy evaluation, and compilation from
//! ReLU networks.

mod compile;
mod dag;
mod fuzzy;
mod llg;
mod sign;

pub use compile::{compile_mlp, compile_mlp_fuzzy, Discovery, DiscoveryMode};
pub use dag::{Arrow, ArrowId, VertexId};
pub use fuzzy::{ArrowMap, FuzzyLinearLogicalGraph, FuzzyOutput, FuzzyVertex, SIMPLEX_TOLERANCE};
pub use llg::{LinearLogicalGraph, Vertex};
pub use sign::{ParseSignError, Sign, SignPattern};

use crate::mlp::{Activation, Head};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("no outgoing arrow of vertex {vertex} matches sign pattern {pattern}")]
    MissingArrow { vertex: VertexId, pattern: SignPattern },
    #[error("input has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("arrow refers to unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("graph must have exactly one source vertex, found {0}")]
    SourceCount(usize),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("sink {0} has outgoing arrows")]
    SinkHasOutgoing(VertexId),
    #[error("non-sink vertex {0} has no outgoing arrow")]
    DeadEnd(VertexId),
    #[error("vertex {0} branches but has no decider")]
    MissingDecider(VertexId),
    #[error("arrow {arrow} out of branching vertex {vertex} has no sign key")]
    MissingKey { vertex: VertexId, arrow: usize },
    #[error("vertex {0} has two outgoing arrows with the same sign key")]
    DuplicateKey(VertexId),
    #[error("sign key at vertex {vertex} has length {got}, decider has {expected} outputs")]
    KeyLength { vertex: VertexId, expected: usize, got: usize },
    #[error("decider at vertex {vertex} takes {got} inputs, expected {expected}")]
    DeciderDimension { vertex: VertexId, expected: usize, got: usize },
    #[error("sink {vertex} refers to unknown label {label}")]
    UnknownLabel { vertex: VertexId, label: usize },
    #[error("target vocabulary is empty")]
    EmptyVocab,
    #[error("{arrows} arrows but {maps} arrow maps")]
    ArrowMapCount { arrows: usize, maps: usize },
    #[error("arrow {0} map does not match its endpoint state spaces")]
    ArrowSignature(usize),
    #[error("state space of vertex {vertex} is not the output simplex")]
    StateSpace { vertex: VertexId },
    #[error("value is not a point of the probability simplex")]
    NotInSimplex,
    #[error("chamber discovery exceeded {limit} vertices")]
    RegionBudgetExceeded { limit: usize },
    #[error("hidden activation {} is not ReLU", .0.name())]
    NonReluActivation(Activation),
    #[error("network head must be {}", .expected.name())]
    HeadMismatch { expected: Head },
}
