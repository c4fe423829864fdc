use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::EnsembleError;
use crate::graph::FuzzyLinearLogicalGraph;
use crate::predictions::PredictionMatrix;

/// Per-instance probability rows over a chart's vocabulary. Instances are
/// addressed by their position in the evaluated dataset.
pub trait PredictionSource: Send + Sync {
    fn predict(&self, instance: usize) -> Option<Vec<f64>>;
}

/// A prediction matrix aligned to the dataset order.
pub struct MatrixSource {
    matrix: Arc<PredictionMatrix>,
    rows: Vec<Option<usize>>,
}

impl MatrixSource {
    /// Looks up every dataset instance id in `matrix`; ids the matrix lacks
    /// are uncovered.
    pub fn aligned<S: AsRef<str>>(matrix: Arc<PredictionMatrix>, dataset_ids: &[S]) -> Self {
        let rows = dataset_ids.iter().map(|id| matrix.position(id.as_ref())).collect();
        Self { matrix, rows }
    }

    pub fn matrix(&self) -> &PredictionMatrix {
        &self.matrix
    }
}

impl PredictionSource for MatrixSource {
    fn predict(&self, instance: usize) -> Option<Vec<f64>> {
        let row = (*self.rows.get(instance)?)?;
        Some(self.matrix.row(row).to_vec())
    }
}

/// Predictions computed by a closure.
pub struct FnSource(Box<dyn Fn(usize) -> Option<Vec<f64>> + Send + Sync>);

impl FnSource {
    pub fn new(f: impl Fn(usize) -> Option<Vec<f64>> + Send + Sync + 'static) -> Self {
        Self(Box::new(f))
    }
}

impl PredictionSource for FnSource {
    fn predict(&self, instance: usize) -> Option<Vec<f64>> {
        (self.0)(instance)
    }
}

/// A fuzzy linear logical graph evaluated on stored instance inputs.
pub struct FuzzyGraphSource {
    graph: Arc<FuzzyLinearLogicalGraph>,
    inputs: Arc<[Vec<f64>]>,
}

impl FuzzyGraphSource {
    pub fn new(graph: Arc<FuzzyLinearLogicalGraph>, inputs: Arc<[Vec<f64>]>) -> Self {
        Self { graph, inputs }
    }
}

impl PredictionSource for FuzzyGraphSource {
    fn predict(&self, instance: usize) -> Option<Vec<f64>> {
        let x = self.inputs.get(instance)?;
        self.graph.evaluate(x).ok().map(|out| out.probs().to_vec())
    }
}

/// Input-side restriction of a chart's domain.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Admissibility {
    #[default]
    All,
    /// Only these dataset positions.
    Indices(BTreeSet<usize>),
    /// Every feature coordinate `j` must lie in `ranges[j]`, inclusive.
    Ranges(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChartRole {
    #[default]
    Plain,
    Expert,
    Filter,
}

/// One model of a logifold: its predictions, target vocabulary and domain.
#[derive(Clone)]
pub struct Chart {
    id: String,
    vocab: Arc<[String]>,
    source: Arc<dyn PredictionSource>,
    admissibility: Admissibility,
    role: ChartRole,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("id", &self.id)
            .field("vocab", &self.vocab)
            .field("admissibility", &self.admissibility)
            .field("role", &self.role)
            .finish_non_exhaustive()
    }
}

impl Chart {
    pub fn new(
        id: impl Into<String>,
        vocab: Vec<String>,
        source: Arc<dyn PredictionSource>,
    ) -> Result<Self, EnsembleError> {
        if vocab.is_empty() {
            return Err(EnsembleError::EmptyLabelSpace);
        }
        let mut seen = BTreeSet::new();
        for l in &vocab {
            if !seen.insert(l.as_str()) {
                return Err(EnsembleError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self {
            id: id.into(),
            vocab: vocab.into(),
            source,
            admissibility: Admissibility::All,
            role: ChartRole::Plain,
        })
    }

    pub fn from_matrix<S: AsRef<str>>(matrix: Arc<PredictionMatrix>, dataset_ids: &[S]) -> Result<Self, EnsembleError> {
        let id: String = matrix.model_id().into();
        let vocab = matrix.vocab().to_vec();
        Self::new(id, vocab, Arc::new(MatrixSource::aligned(matrix, dataset_ids)))
    }

    pub fn with_admissibility(mut self, admissibility: Admissibility) -> Self {
        self.admissibility = admissibility;
        self
    }

    pub fn with_role(mut self, role: ChartRole) -> Self {
        self.role = role;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn role(&self) -> ChartRole {
        self.role
    }

    pub fn admissibility(&self) -> &Admissibility {
        &self.admissibility
    }

    /// The chart's probability row for `instance`, `None` if uncovered.
    pub fn predict(&self, instance: usize) -> Result<Option<Vec<f64>>, EnsembleError> {
        match self.source.predict(instance) {
            Some(row) if row.len() != self.vocab.len() => Err(EnsembleError::RowLength {
                chart: self.id.clone(),
                instance,
                expected: self.vocab.len(),
                got: row.len(),
            }),
            other => Ok(other),
        }
    }

    pub fn admits(&self, instance: usize, features: Option<&[Vec<f64>]>) -> Result<bool, EnsembleError> {
        Ok(match &self.admissibility {
            Admissibility::All => true,
            Admissibility::Indices(set) => set.contains(&instance),
            Admissibility::Ranges(ranges) => {
                let x = features
                    .and_then(|f| f.get(instance))
                    .ok_or_else(|| EnsembleError::MissingFeatures(self.id.clone()))?;
                x.len() == ranges.len() && x.iter().zip(ranges).all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
            }
        })
    }
}
