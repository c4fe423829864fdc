//! Combination of charts with restricted domains.
//!
//! Each chart is a model together with its target vocabulary and the part of
//! the dataset it is trusted on. The fuzzy domain of a chart at threshold
//! `t` is the set of admissible instances on which its certainty exceeds
//! `t`; refined voting averages only the charts whose fuzzy domain contains
//! the instance.

mod chart;
mod labels;
mod logifold;

pub use chart::{Admissibility, Chart, ChartRole, FnSource, FuzzyGraphSource, MatrixSource, PredictionSource};
pub use labels::{GlobalLabelSpace, ThresholdLadder};
pub use logifold::{Combined, EvaluationRow, EvaluationTable, Logifold, Routing, TableCounts};

use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::FuzzyOutput;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnsembleError {
    #[error("no chart covers instance {0}")]
    NoChartCovers(usize),
    #[error("chart `{chart}` has no prediction for instance {instance}")]
    MissingPrediction { chart: String, instance: usize },
    #[error("chart `{chart}` produced a row of length {got} for instance {instance}, expected {expected}")]
    RowLength { chart: String, instance: usize, expected: usize, got: usize },
    #[error("label `{0}` is not in the global label space")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label space is empty")]
    EmptyLabelSpace,
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("duplicate chart id `{0}`")]
    DuplicateChart(String),
    #[error("a logifold needs at least one chart")]
    NoCharts,
    #[error("coarse label `{0}` of the filter has no expert")]
    IncompleteCoarseMap(String),
    #[error("chart `{0}` restricts input ranges but the logifold has no instance features")]
    MissingFeatures(String),
    #[error("invalid threshold ladder: {0}")]
    InvalidLadder(&'static str),
    #[error("threshold {0} is outside [0, 1)")]
    InvalidThreshold(f64),
    #[error("{labels} ground-truth labels for {instances} instances")]
    TruthLength { labels: usize, instances: usize },
}

/// Logistic function `1 / (1 + e^{-x})`, used to lay out certainty
/// thresholds.
pub fn sigma_threshold(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Maximum coordinate of a fuzzy output.
pub fn certainty(out: &FuzzyOutput) -> f64 {
    out.certainty()
}

/// Zero-pads `out` from its own vocabulary into the global label order.
pub fn embed_to_global(out: &FuzzyOutput, global: &GlobalLabelSpace) -> Result<FuzzyOutput, EnsembleError> {
    let mut probs = alloc::vec![0.0; global.len()];
    for (label, p) in out.vocab().iter().zip(out.probs()) {
        let g = global.index_of(label).ok_or_else(|| EnsembleError::UnknownLabel(label.clone()))?;
        probs[g] = *p;
    }
    FuzzyOutput::new(global.shared(), probs).map_err(|_| EnsembleError::EmptyLabelSpace)
}

fn max_coordinate(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn check_threshold(t: f64) -> Result<(), EnsembleError> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(EnsembleError::InvalidThreshold(t))
    }
}

/// Indices of `instances` in the fuzzy domain of `chart` at level `t`:
/// admissible instances whose certainty is strictly greater than `t`.
pub fn fuzzy_domain(
    chart: &Chart,
    instances: impl IntoIterator<Item = usize>,
    t: f64,
    features: Option<&[Vec<f64>]>,
) -> Result<Vec<usize>, EnsembleError> {
    check_threshold(t)?;
    let mut out = Vec::new();
    for i in instances {
        let row = chart
            .predict(i)?
            .ok_or_else(|| EnsembleError::MissingPrediction { chart: chart.id().into(), instance: i })?;
        if max_coordinate(&row) > t && chart.admits(i, features)? {
            out.push(i);
        }
    }
    Ok(out)
}
