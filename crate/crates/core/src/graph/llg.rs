use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::dag::{self, Arrow, Outgoing, VertexId, VertexShape};
use super::{GraphError, SignPattern};
use crate::affine::AffineMap;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Vertex {
    Branch {
        /// Affine map whose sign chambers select the outgoing arrow.
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        decider: Option<AffineMap>,
        /// Depth in the compiled layering; informational only.
        #[cfg_attr(feature = "serde", serde(default))]
        layer: u32,
    },
    Sink {
        /// Index into the target vocabulary.
        label: usize,
    },
}

impl Vertex {
    pub fn decider(&self) -> Option<&AffineMap> {
        match self {
            Vertex::Branch { decider, .. } => decider.as_ref(),
            Vertex::Sink { .. } => None,
        }
    }

    fn shape(&self) -> VertexShape {
        VertexShape { is_sink: matches!(self, Vertex::Sink { .. }), decider_rows: self.decider().map(AffineMap::rows) }
    }
}

/// A finite DAG with one source, affine deciders at branching vertices and
/// labelled sinks. Evaluating it traces the unique path selected by the
/// deciders' sign chambers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawGraph", into = "RawGraph"))]
pub struct LinearLogicalGraph {
    input_dim: usize,
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
    source: VertexId,
    target_vocab: Vec<String>,
    outgoing: Vec<Outgoing>,
}

#[cfg(feature = "serde")]
#[derive(Serialize, Deserialize)]
struct RawGraph {
    input_dim: usize,
    target_vocab: Vec<String>,
    source: VertexId,
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawGraph> for LinearLogicalGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        LinearLogicalGraph::new(raw.input_dim, raw.vertices, raw.arrows, raw.source, raw.target_vocab)
    }
}

#[cfg(feature = "serde")]
impl From<LinearLogicalGraph> for RawGraph {
    fn from(g: LinearLogicalGraph) -> Self {
        RawGraph {
            input_dim: g.input_dim,
            target_vocab: g.target_vocab,
            source: g.source,
            vertices: g.vertices,
            arrows: g.arrows,
        }
    }
}

impl LinearLogicalGraph {
    pub fn new(
        input_dim: usize,
        vertices: Vec<Vertex>,
        arrows: Vec<Arrow>,
        source: VertexId,
        target_vocab: Vec<String>,
    ) -> Result<Self, GraphError> {
        for (v, vertex) in vertices.iter().enumerate() {
            match vertex {
                Vertex::Sink { label } if *label >= target_vocab.len() => {
                    return Err(GraphError::UnknownLabel { vertex: v, label: *label });
                }
                Vertex::Branch { decider: Some(d), .. } if d.cols() != input_dim => {
                    return Err(GraphError::DeciderDimension { vertex: v, expected: input_dim, got: d.cols() });
                }
                _ => {}
            }
        }
        let shapes: Vec<VertexShape> = vertices.iter().map(Vertex::shape).collect();
        let outgoing = dag::index(&shapes, &arrows, source)?;
        Ok(Self { input_dim, vertices, arrows, source, target_vocab, outgoing })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target_vocab(&self) -> &[String] {
        &self.target_vocab
    }

    /// Number of branch vertices at each compiled layer, source first.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = Vec::new();
        for v in &self.vertices {
            if let Vertex::Branch { layer, .. } = v {
                let l = *layer as usize;
                if sizes.len() <= l {
                    sizes.resize(l + 1, 0);
                }
                sizes[l] += 1;
            }
        }
        sizes
    }

    /// Traces `x` from the source and returns the index of the reached
    /// sink's label.
    pub fn evaluate(&self, x: &[f64]) -> Result<usize, GraphError> {
        if x.len() != self.input_dim {
            return Err(GraphError::DimensionMismatch { expected: self.input_dim, got: x.len() });
        }
        let mut v = self.source;
        loop {
            let next = match &self.outgoing[v] {
                Outgoing::None => match self.vertices[v] {
                    Vertex::Sink { label } => return Ok(label),
                    // index() rejects branch vertices without arrows
                    Vertex::Branch { .. } => unreachable!(),
                },
                Outgoing::Single(a) => *a,
                Outgoing::Keyed(map) => {
                    // index() guarantees keyed vertices carry a decider
                    let decider = self.vertices[v].decider().expect("keyed vertex has a decider");
                    let pattern = SignPattern::of_values(&decider.apply(x));
                    *map.get(&pattern).ok_or(GraphError::MissingArrow { vertex: v, pattern })?
                }
            };
            v = self.arrows[next].target;
        }
    }

    pub fn evaluate_label(&self, x: &[f64]) -> Result<&str, GraphError> {
        self.evaluate(x).map(|i| self.target_vocab[i].as_str())
    }
}
