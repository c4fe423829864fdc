//! Validated per-instance probability tables and ground-truth labels.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Largest accepted `|Σ row − 1|` before renormalization.
pub const ROW_SUM_TOLERANCE: f64 = 1e-5;
/// Entries down to this value are read as rounding noise and clamped to 0.
pub const NEGATIVE_TOLERANCE: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredictionError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("row for instance `{instance}` sums to {sum}")]
    RowSum { instance: String, sum: f64 },
    #[error("row for instance `{instance}` has {got} entries, expected {expected}")]
    RowLength { instance: String, expected: usize, got: usize },
    #[error("row for instance `{instance}` has a negative or non-finite entry")]
    BadProbability { instance: String },
    #[error("duplicate instance `{0}`")]
    DuplicateInstance(String),
    #[error("label `{0}` is not in the label space")]
    UnknownLabel(String),
}

/// Output of one model over a set of instances: one probability row per
/// instance over the model's vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    model_id: String,
    vocab: Arc<[String]>,
    instance_ids: Vec<String>,
    rows: Vec<f64>,
    index: BTreeMap<String, usize>,
}

impl PredictionMatrix {
    /// Validates and renormalizes. Rows must sum to 1 within
    /// [`ROW_SUM_TOLERANCE`]; afterwards each row sums to 1 up to the last
    /// bit.
    pub fn new(
        model_id: String,
        vocab: Vec<String>,
        instance_ids: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, PredictionError> {
        if vocab.is_empty() {
            return Err(PredictionError::Schema("empty label list".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &vocab {
            if l.is_empty() || !seen.insert(l.as_str()) {
                return Err(PredictionError::Schema(alloc::format!("invalid or repeated label `{l}`")));
            }
        }
        if instance_ids.len() != rows.len() {
            return Err(PredictionError::Schema("instance ids and rows differ in length".into()));
        }
        let k = vocab.len();
        let mut index = BTreeMap::new();
        let mut flat = Vec::with_capacity(rows.len() * k);
        for (i, (id, row)) in instance_ids.iter().zip(rows).enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(PredictionError::DuplicateInstance(id.clone()));
            }
            if row.len() != k {
                return Err(PredictionError::RowLength { instance: id.clone(), expected: k, got: row.len() });
            }
            flat.extend(normalize_row(id, row)?);
        }
        Ok(Self { model_id, vocab: vocab.into(), instance_ids, rows: flat, index })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn vocab(&self) -> &Arc<[String]> {
        &self.vocab
    }

    pub fn instance_ids(&self) -> &[String] {
        &self.instance_ids
    }

    pub fn len(&self) -> usize {
        self.instance_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instance_ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.vocab.len();
        &self.rows[i * k..(i + 1) * k]
    }

    pub fn row_by_id(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

fn normalize_row(id: &str, mut row: Vec<f64>) -> Result<Vec<f64>, PredictionError> {
    for p in &mut row {
        if !p.is_finite() || *p < NEGATIVE_TOLERANCE {
            return Err(PredictionError::BadProbability { instance: id.into() });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let sum: f64 = row.iter().sum();
    if libm::fabs(sum - 1.0) > ROW_SUM_TOLERANCE {
        return Err(PredictionError::RowSum { instance: id.into(), sum });
    }
    row.iter_mut().for_each(|p| *p /= sum);
    // put the division's rounding residue on the largest entry
    let top = crate::mlp::argmax(&row);
    let rest: f64 = row.iter().enumerate().filter(|(i, _)| *i != top).map(|(_, p)| p).sum();
    row[top] = (1.0 - rest).max(0.0);
    Ok(row)
}

/// Reference labels for a dataset, in instance order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    instance_ids: Vec<String>,
    labels: Vec<String>,
}

impl GroundTruth {
    pub fn new(instance_ids: Vec<String>, labels: Vec<String>) -> Result<Self, PredictionError> {
        if instance_ids.len() != labels.len() {
            return Err(PredictionError::Schema("instance ids and labels differ in length".into()));
        }
        let mut seen = BTreeSet::new();
        for id in &instance_ids {
            if !seen.insert(id.as_str()) {
                return Err(PredictionError::DuplicateInstance(id.clone()));
            }
        }
        Ok(Self { instance_ids, labels })
    }

    pub fn instance_ids(&self) -> &[String] {
        &self.instance_ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
