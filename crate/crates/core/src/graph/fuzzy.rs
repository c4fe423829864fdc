use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::dag::{self, Arrow, Outgoing, VertexId, VertexShape};
use super::{GraphError, SignPattern};
use crate::affine::AffineMap;
use crate::mlp::softmax;

/// Sum tolerance for points of a probability simplex.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A point of the probability simplex over an ordered vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyOutput {
    vocab: Arc<[String]>,
    probs: Vec<f64>,
}

impl FuzzyOutput {
    pub fn new(vocab: Arc<[String]>, probs: Vec<f64>) -> Result<Self, GraphError> {
        if probs.len() != vocab.len() {
            return Err(GraphError::DimensionMismatch { expected: vocab.len(), got: probs.len() });
        }
        check_simplex(&probs)?;
        Ok(Self { vocab, probs })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn shared_vocab(&self) -> &Arc<[String]> {
        &self.vocab
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest coordinate.
    pub fn certainty(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Lowest index attaining the largest coordinate.
    pub fn argmax(&self) -> usize {
        crate::mlp::argmax(&self.probs)
    }
}

pub(crate) fn check_simplex(probs: &[f64]) -> Result<(), GraphError> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || libm::fabs(sum - 1.0) > SIMPLEX_TOLERANCE {
        return Err(GraphError::NotInSimplex);
    }
    Ok(())
}

/// Continuous map carried by an arrow between internal state spaces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ArrowMap {
    Identity,
    /// `SoftMax ∘ l`, landing in a single simplex.
    AffineSoftmax {
        map: AffineMap,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FuzzyVertex {
    /// Dimensions `d_k` of the simplex factors `S^{d_k}` of the internal
    /// state space.
    pub state_space: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub decider: Option<AffineMap>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sink: bool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub layer: u32,
}

impl FuzzyVertex {
    /// Number of affine coordinates of the state space.
    pub fn chart_dim(&self) -> usize {
        self.state_space.iter().sum()
    }
}

/// A linear logical graph whose vertices carry products of simplices and
/// whose arrows carry maps between them.
///
/// States are stored in affine coordinates: each factor `S^d` contributes
/// its last `d` barycentric coordinates, the first one being `1 - Σ`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawFuzzy", into = "RawFuzzy"))]
pub struct FuzzyLinearLogicalGraph {
    vertices: Vec<FuzzyVertex>,
    arrows: Vec<Arrow>,
    arrow_maps: Vec<ArrowMap>,
    source: VertexId,
    out_vocab: Arc<[String]>,
    outgoing: Vec<Outgoing>,
}

#[cfg(feature = "serde")]
#[derive(Serialize, Deserialize)]
struct RawFuzzy {
    out_vocab: Vec<String>,
    source: VertexId,
    vertices: Vec<FuzzyVertex>,
    arrows: Vec<Arrow>,
    arrow_maps: Vec<ArrowMap>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawFuzzy> for FuzzyLinearLogicalGraph {
    type Error = GraphError;

    fn try_from(raw: RawFuzzy) -> Result<Self, GraphError> {
        FuzzyLinearLogicalGraph::new(raw.vertices, raw.arrows, raw.arrow_maps, raw.source, raw.out_vocab)
    }
}

#[cfg(feature = "serde")]
impl From<FuzzyLinearLogicalGraph> for RawFuzzy {
    fn from(g: FuzzyLinearLogicalGraph) -> Self {
        RawFuzzy {
            out_vocab: g.out_vocab.to_vec(),
            source: g.source,
            vertices: g.vertices,
            arrows: g.arrows,
            arrow_maps: g.arrow_maps,
        }
    }
}

impl FuzzyLinearLogicalGraph {
    pub fn new(
        vertices: Vec<FuzzyVertex>,
        arrows: Vec<Arrow>,
        arrow_maps: Vec<ArrowMap>,
        source: VertexId,
        out_vocab: Vec<String>,
    ) -> Result<Self, GraphError> {
        if out_vocab.is_empty() {
            return Err(GraphError::EmptyVocab);
        }
        if arrow_maps.len() != arrows.len() {
            return Err(GraphError::ArrowMapCount { arrows: arrows.len(), maps: arrow_maps.len() });
        }
        let sink_space = [out_vocab.len() - 1];
        for (v, vertex) in vertices.iter().enumerate() {
            if vertex.sink && vertex.state_space != sink_space {
                return Err(GraphError::StateSpace { vertex: v });
            }
            if let Some(d) = &vertex.decider {
                if d.cols() != vertex.chart_dim() {
                    return Err(GraphError::DeciderDimension {
                        vertex: v,
                        expected: vertex.chart_dim(),
                        got: d.cols(),
                    });
                }
            }
        }
        for (a, (arrow, map)) in arrows.iter().zip(&arrow_maps).enumerate() {
            let (Some(src), Some(dst)) = (vertices.get(arrow.source), vertices.get(arrow.target)) else {
                continue; // reported by dag::index
            };
            let ok = match map {
                ArrowMap::Identity => src.state_space == dst.state_space,
                ArrowMap::AffineSoftmax { map } => {
                    map.cols() == src.chart_dim() && dst.state_space == [map.rows().saturating_sub(1)] && map.rows() > 0
                }
            };
            if !ok {
                return Err(GraphError::ArrowSignature(a));
            }
        }
        let shapes: Vec<VertexShape> = vertices
            .iter()
            .map(|v| VertexShape { is_sink: v.sink, decider_rows: v.decider.as_ref().map(AffineMap::rows) })
            .collect();
        let outgoing = dag::index(&shapes, &arrows, source)?;
        Ok(Self { vertices, arrows, arrow_maps, source, out_vocab: out_vocab.into(), outgoing })
    }

    pub fn vertices(&self) -> &[FuzzyVertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_maps(&self) -> &[ArrowMap] {
        &self.arrow_maps
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn out_vocab(&self) -> &Arc<[String]> {
        &self.out_vocab
    }

    /// Affine-coordinate dimension of the source state space.
    pub fn input_dim(&self) -> usize {
        self.vertices[self.source].chart_dim()
    }

    /// Follows the path chosen by the deciders on the running internal state
    /// and composes the arrow maps along it.
    pub fn evaluate(&self, x: &[f64]) -> Result<FuzzyOutput, GraphError> {
        if x.len() != self.input_dim() {
            return Err(GraphError::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        let mut state = x.to_vec();
        let mut v = self.source;
        loop {
            let next = match &self.outgoing[v] {
                Outgoing::None => return self.sink_output(&state),
                Outgoing::Single(a) => *a,
                Outgoing::Keyed(map) => {
                    let decider = self.vertices[v].decider.as_ref().expect("keyed vertex has a decider");
                    let pattern = SignPattern::of_values(&decider.apply(&state));
                    *map.get(&pattern).ok_or(GraphError::MissingArrow { vertex: v, pattern })?
                }
            };
            state = match &self.arrow_maps[next] {
                ArrowMap::Identity => state,
                ArrowMap::AffineSoftmax { map } => {
                    let mut p = softmax(&map.apply(&state));
                    p.remove(0);
                    p
                }
            };
            v = self.arrows[next].target;
        }
    }

    fn sink_output(&self, coords: &[f64]) -> Result<FuzzyOutput, GraphError> {
        let rest: f64 = coords.iter().sum();
        let mut probs = Vec::with_capacity(coords.len() + 1);
        probs.push(1.0 - rest);
        probs.extend_from_slice(coords);
        // absorb rounding below zero from the 1 - Σ reconstruction
        for p in &mut probs {
            if *p < 0.0 && *p > -1e-12 {
                *p = 0.0;
            }
        }
        FuzzyOutput::new(self.out_vocab.clone(), probs)
    }
}
