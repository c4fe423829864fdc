use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_threshold, max_coordinate, Chart, EnsembleError, GlobalLabelSpace, ThresholdLadder};
use crate::mlp::argmax;

/// Filter chart plus the expert chart engaged for each of its coarse labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing {
    filter: usize,
    /// Expert chart index per filter vocabulary position.
    experts: Vec<usize>,
}

impl Routing {
    pub fn filter(&self) -> usize {
        self.filter
    }

    pub fn experts(&self) -> &[usize] {
        &self.experts
    }
}

/// Result of combining the charts on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Combined {
    /// Global label index.
    pub label: usize,
    /// Mean of the (possibly filter-scaled) embedded outputs of the selected
    /// charts. Sums to 1 unless a routed expert was scaled.
    pub scores: Vec<f64>,
    /// Largest coordinate of `scores`.
    pub certainty: f64,
    /// Charts that contributed, by index.
    pub contributors: Vec<usize>,
    /// `true` when no chart was certain and every admissible chart voted.
    pub fell_back: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationRow {
    pub threshold: f64,
    pub acc_refined: f64,
    pub acc_certain: f64,
    pub n_certain: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTable {
    pub size: usize,
    pub rows: Vec<EvaluationRow>,
    pub simple_average: f64,
    pub majority_vote: f64,
}

/// Per-threshold counts, summable across instances in any order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableCounts {
    pub size: usize,
    pub refined_correct: Vec<usize>,
    pub certain: Vec<usize>,
    pub certain_correct: Vec<usize>,
    pub simple_correct: usize,
    pub majority_correct: usize,
}

impl TableCounts {
    fn empty(thresholds: usize) -> Self {
        Self {
            size: 0,
            refined_correct: vec![0; thresholds],
            certain: vec![0; thresholds],
            certain_correct: vec![0; thresholds],
            simple_correct: 0,
            majority_correct: 0,
        }
    }

    pub fn merge(mut self, other: &TableCounts) -> Self {
        if self.refined_correct.is_empty() {
            return other.clone();
        }
        self.size += other.size;
        for (a, b) in [
            (&mut self.refined_correct, &other.refined_correct),
            (&mut self.certain, &other.certain),
            (&mut self.certain_correct, &other.certain_correct),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.simple_correct += other.simple_correct;
        self.majority_correct += other.majority_correct;
        self
    }

    pub fn into_table(self, ladder: &ThresholdLadder) -> EvaluationTable {
        let n = self.size;
        let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let rows = ladder
            .thresholds()
            .iter()
            .enumerate()
            .map(|(k, &threshold)| EvaluationRow {
                threshold,
                acc_refined: frac(self.refined_correct[k], n),
                acc_certain: frac(self.certain_correct[k], self.certain[k]),
                n_certain: self.certain[k],
            })
            .collect();
        EvaluationTable {
            size: n,
            rows,
            simple_average: frac(self.simple_correct, n),
            majority_vote: frac(self.majority_correct, n),
        }
    }
}

/// A collection of charts over a global label space, combined by refined
/// voting along a threshold ladder.
#[derive(Debug, Clone)]
pub struct Logifold {
    charts: Vec<Chart>,
    global: GlobalLabelSpace,
    ladder: ThresholdLadder,
    routing: Option<Routing>,
    features: Option<Arc<[Vec<f64>]>>,
    /// Global index of each chart vocabulary entry.
    embed: Vec<Vec<usize>>,
    /// Chart indices sorted by id; all sums run in this order.
    order: Vec<usize>,
}

/// Everything the voting rules read about one instance.
struct InstanceView {
    outputs: Vec<Option<Vec<f64>>>,
    admissible: Vec<bool>,
}

impl Logifold {
    pub fn new(charts: Vec<Chart>, global: GlobalLabelSpace, ladder: ThresholdLadder) -> Result<Self, EnsembleError> {
        if charts.is_empty() {
            return Err(EnsembleError::NoCharts);
        }
        let mut ids = BTreeMap::new();
        for (i, c) in charts.iter().enumerate() {
            if ids.insert(c.id(), i).is_some() {
                return Err(EnsembleError::DuplicateChart(c.id().into()));
            }
        }
        let order = ids.values().copied().collect();
        let embed = charts
            .iter()
            .map(|c| {
                c.vocab()
                    .iter()
                    .map(|l| global.index_of(l).ok_or_else(|| EnsembleError::UnknownLabel(l.clone())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { charts, global, ladder, routing: None, features: None, embed, order })
    }

    /// Instance inputs used by range admissibility checks.
    pub fn with_features(mut self, features: Arc<[Vec<f64>]>) -> Self {
        self.features = Some(features);
        self
    }

    pub fn with_ladder(mut self, ladder: ThresholdLadder) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn global(&self) -> &GlobalLabelSpace {
        &self.global
    }

    pub fn ladder(&self) -> &ThresholdLadder {
        &self.ladder
    }

    pub fn routing(&self) -> Option<&Routing> {
        self.routing.as_ref()
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.id() == id)
    }

    /// Installs a filter chart whose argmax coarse label decides which
    /// expert chart votes. `coarse_map` sends every label of the filter's
    /// vocabulary to an expert chart id.
    pub fn specialize_routing(
        &self,
        filter_id: &str,
        coarse_map: &BTreeMap<String, String>,
    ) -> Result<Logifold, EnsembleError> {
        let filter = self.chart_index(filter_id).ok_or_else(|| EnsembleError::UnknownChart(filter_id.into()))?;
        let filter_vocab = self.charts[filter].vocab();
        for coarse in coarse_map.keys() {
            if !filter_vocab.contains(coarse) {
                return Err(EnsembleError::UnknownLabel(coarse.clone()));
            }
        }
        let experts = filter_vocab
            .iter()
            .map(|coarse| {
                let expert =
                    coarse_map.get(coarse).ok_or_else(|| EnsembleError::IncompleteCoarseMap(coarse.clone()))?;
                self.chart_index(expert).ok_or_else(|| EnsembleError::UnknownChart(expert.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = self.clone();
        out.routing = Some(Routing { filter, experts });
        Ok(out)
    }

    fn view(&self, i: usize) -> Result<InstanceView, EnsembleError> {
        let features = self.features.as_deref();
        let mut outputs = Vec::with_capacity(self.charts.len());
        let mut admissible = Vec::with_capacity(self.charts.len());
        for chart in &self.charts {
            outputs.push(chart.predict(i)?);
            admissible.push(chart.admits(i, features)?);
        }
        Ok(InstanceView { outputs, admissible })
    }

    /// Charts allowed to vote on this instance and the factor their output
    /// is scaled by. Routed experts are scaled by the filter's certainty.
    fn participants(&self, view: &InstanceView) -> Vec<(usize, f64)> {
        let usable = |c: usize| view.outputs[c].is_some() && view.admissible[c];
        let mut scale: Vec<Option<f64>> = (0..self.charts.len()).map(|c| usable(c).then_some(1.0)).collect();
        if let Some(routing) = &self.routing {
            scale[routing.filter] = None;
            for &e in &routing.experts {
                scale[e] = None;
            }
            if usable(routing.filter) {
                let f = view.outputs[routing.filter].as_deref().unwrap_or_default();
                let expert = routing.experts[argmax(f)];
                if usable(expert) {
                    scale[expert] = Some(max_coordinate(f));
                }
            }
        }
        self.order.iter().filter_map(|&c| scale[c].map(|s| (c, s))).collect()
    }

    fn embedded_sum(&self, view: &InstanceView, charts: &[(usize, f64)]) -> Vec<f64> {
        let mut acc = vec![0.0; self.global.len()];
        for &(c, s) in charts {
            let row = view.outputs[c].as_deref().unwrap_or_default();
            for (p, &g) in row.iter().zip(&self.embed[c]) {
                acc[g] += s * p;
            }
        }
        acc
    }

    fn vote(&self, i: usize, view: &InstanceView, t: f64) -> Result<Combined, EnsembleError> {
        let participants = self.participants(view);
        if participants.is_empty() {
            return Err(EnsembleError::NoChartCovers(i));
        }
        let certain: Vec<(usize, f64)> = participants
            .iter()
            .copied()
            .filter(|&(c, s)| s * max_coordinate(view.outputs[c].as_deref().unwrap_or_default()) > t)
            .collect();
        let fell_back = certain.is_empty();
        let selected = if fell_back { participants } else { certain };
        let mut scores = self.embedded_sum(view, &selected);
        let n = selected.len() as f64;
        scores.iter_mut().for_each(|v| *v /= n);
        Ok(Combined {
            label: argmax(&scores),
            certainty: max_coordinate(&scores),
            scores,
            contributors: selected.into_iter().map(|(c, _)| c).collect(),
            fell_back,
        })
    }

    /// Refined voting at threshold `t`: average the globally embedded
    /// outputs of the charts certain above `t` on instance `i`, falling back
    /// to every admissible chart when none is.
    pub fn refined_vote(&self, i: usize, t: f64) -> Result<Combined, EnsembleError> {
        check_threshold(t)?;
        self.vote(i, &self.view(i)?, t)
    }

    fn covering(&self, view: &InstanceView) -> Vec<(usize, f64)> {
        self.order.iter().filter(|&&c| view.outputs[c].is_some()).map(|&c| (c, 1.0)).collect()
    }

    fn simple_average_of(&self, i: usize, view: &InstanceView) -> Result<usize, EnsembleError> {
        let charts = self.covering(view);
        if charts.is_empty() {
            return Err(EnsembleError::NoChartCovers(i));
        }
        Ok(argmax(&self.embedded_sum(view, &charts)))
    }

    fn majority_of(&self, i: usize, view: &InstanceView) -> Result<usize, EnsembleError> {
        let charts = self.covering(view);
        if charts.is_empty() {
            return Err(EnsembleError::NoChartCovers(i));
        }
        let mut counts = vec![0.0; self.global.len()];
        for (c, _) in charts {
            let row = view.outputs[c].as_deref().unwrap_or_default();
            counts[self.embed[c][argmax(row)]] += 1.0;
        }
        Ok(argmax(&counts))
    }

    /// Argmax of the unweighted mean over every chart covering `i`, ignoring
    /// domains and routing.
    pub fn simple_average(&self, i: usize) -> Result<usize, EnsembleError> {
        self.simple_average_of(i, &self.view(i)?)
    }

    /// Most frequent chart argmax, lowest global index on ties.
    pub fn majority_vote(&self, i: usize) -> Result<usize, EnsembleError> {
        self.majority_of(i, &self.view(i)?)
    }

    /// Maps ground-truth label names to global indices.
    pub fn truth_indices<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, EnsembleError> {
        labels
            .iter()
            .map(|l| self.global.index_of(l.as_ref()).ok_or_else(|| EnsembleError::UnknownLabel(l.as_ref().into())))
            .collect()
    }

    /// Counts for one instance with true label `truth` (global index).
    pub fn tally(&self, i: usize, truth: usize) -> Result<TableCounts, EnsembleError> {
        let view = self.view(i)?;
        let ladder = self.ladder.thresholds();
        let mut counts = TableCounts::empty(ladder.len());
        counts.size = 1;
        for (k, &t) in ladder.iter().enumerate() {
            let combined = self.vote(i, &view, t)?;
            let hit = usize::from(combined.label == truth);
            counts.refined_correct[k] = hit;
            if combined.certainty > t {
                counts.certain[k] = 1;
                counts.certain_correct[k] = hit;
            }
        }
        counts.simple_correct = usize::from(self.simple_average_of(i, &view)? == truth);
        counts.majority_correct = usize::from(self.majority_of(i, &view)? == truth);
        Ok(counts)
    }

    /// Accuracy of refined voting at every ladder threshold, the accuracy
    /// and size of the part where the combined certainty exceeds the
    /// threshold, and the simple-average and majority-vote baselines.
    pub fn evaluate_table(&self, truth: &[usize]) -> Result<EvaluationTable, EnsembleError> {
        let mut total = TableCounts::empty(self.ladder.thresholds().len());
        for (i, &label) in truth.iter().enumerate() {
            total = total.merge(&self.tally(i, label)?);
        }
        Ok(total.into_table(&self.ladder))
    }
}
