use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{sigma_threshold, EnsembleError};

/// Ordered set of every label any chart can emit.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalLabelSpace {
    labels: Arc<[String]>,
    index: BTreeMap<String, usize>,
}

impl GlobalLabelSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, EnsembleError> {
        if labels.is_empty() {
            return Err(EnsembleError::EmptyLabelSpace);
        }
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(EnsembleError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels: labels.into(), index })
    }

    /// Union in first-occurrence order.
    pub fn union<V: AsRef<[String]>>(vocabs: &[V]) -> Result<Self, EnsembleError> {
        let mut labels = Vec::new();
        let mut seen = BTreeMap::new();
        for vocab in vocabs {
            for l in vocab.as_ref() {
                if seen.insert(l.clone(), ()).is_none() {
                    labels.push(l.clone());
                }
            }
        }
        Self::new(labels)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shared(&self) -> Arc<[String]> {
        self.labels.clone()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

/// Ascending certainty thresholds starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdLadder(Vec<f64>);

impl ThresholdLadder {
    pub fn new(thresholds: Vec<f64>) -> Result<Self, EnsembleError> {
        match thresholds.first() {
            None => return Err(EnsembleError::InvalidLadder("empty")),
            Some(&first) if first != 0.0 => return Err(EnsembleError::InvalidLadder("must start at 0")),
            _ => {}
        }
        if thresholds.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less)) {
            return Err(EnsembleError::InvalidLadder("must be strictly ascending"));
        }
        if thresholds.iter().any(|t| t.partial_cmp(&1.0) != Some(core::cmp::Ordering::Less)) {
            return Err(EnsembleError::InvalidLadder("thresholds must be below 1"));
        }
        Ok(Self(thresholds))
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.0
    }
}

impl Default for ThresholdLadder {
    /// `0` followed by `σ(k/2)` for `k = 0..=20`.
    fn default() -> Self {
        let mut t = alloc::vec![0.0];
        t.extend((0..=20).map(|k| sigma_threshold(k as f64 / 2.0)));
        Self(t)
    }
}
