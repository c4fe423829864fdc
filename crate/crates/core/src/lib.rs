//! Linear logical graphs, fuzzy charts and their certainty-restricted
//! combination into a logifold, plus exact analysis of dyadic step-function
//! ensembles.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the table
//! writer and the command-line driver live in the `logifold` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod affine;
pub mod ensemble;
pub mod graph;
pub mod lp;
pub mod mlp;
pub mod predictions;
pub mod theory;

pub use affine::{AffineError, AffineMap};
pub use ensemble::{
    Admissibility, Chart, ChartRole, Combined, EnsembleError, EvaluationRow, EvaluationTable, GlobalLabelSpace,
    Logifold, ThresholdLadder,
};
pub use graph::{
    compile_mlp, compile_mlp_fuzzy, ArrowMap, Discovery, DiscoveryMode, FuzzyLinearLogicalGraph, FuzzyOutput,
    GraphError, LinearLogicalGraph, Sign, SignPattern,
};
pub use mlp::{Activation, Head, MlpError, MlpSpec};
pub use predictions::{GroundTruth, PredictionError, PredictionMatrix};
