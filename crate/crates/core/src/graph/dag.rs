//! Structural checks shared by the crisp and fuzzy graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::{GraphError, SignPattern};

pub type VertexId = usize;
pub type ArrowId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Arrow {
    pub source: VertexId,
    pub target: VertexId,
    /// Chamber of the source vertex's decider selecting this arrow. Only
    /// required when the source has several outgoing arrows.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub key: Option<SignPattern>,
}

/// How a vertex picks its next arrow.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outgoing {
    None,
    Single(ArrowId),
    Keyed(BTreeMap<SignPattern, ArrowId>),
}

/// What the validator needs to know about one vertex.
pub(crate) struct VertexShape {
    pub is_sink: bool,
    pub decider_rows: Option<usize>,
}

/// Validates acyclicity, the single source, sink termination and arrow keys,
/// and builds the per-vertex dispatch table.
pub(crate) fn index(shapes: &[VertexShape], arrows: &[Arrow], source: VertexId) -> Result<Vec<Outgoing>, GraphError> {
    let n = shapes.len();
    if source >= n {
        return Err(GraphError::UnknownVertex(source));
    }
    let mut out: Vec<Vec<ArrowId>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (id, a) in arrows.iter().enumerate() {
        if a.source >= n {
            return Err(GraphError::UnknownVertex(a.source));
        }
        if a.target >= n {
            return Err(GraphError::UnknownVertex(a.target));
        }
        out[a.source].push(id);
        indegree[a.target] += 1;
    }

    let roots: Vec<VertexId> = (0..n).filter(|&v| indegree[v] == 0).collect();
    if roots != [source] {
        return Err(GraphError::SourceCount(roots.len()));
    }

    // Kahn's algorithm; anything left unvisited sits on a cycle
    let mut remaining = indegree.clone();
    let mut stack = vec![source];
    let mut visited = 0;
    while let Some(v) = stack.pop() {
        visited += 1;
        for &a in &out[v] {
            let t = arrows[a].target;
            remaining[t] -= 1;
            if remaining[t] == 0 {
                stack.push(t);
            }
        }
    }
    if visited != n {
        return Err(GraphError::Cycle);
    }

    let mut table = Vec::with_capacity(n);
    for (v, shape) in shapes.iter().enumerate() {
        let arrows_out = &out[v];
        let entry = if shape.is_sink {
            if !arrows_out.is_empty() {
                return Err(GraphError::SinkHasOutgoing(v));
            }
            Outgoing::None
        } else {
            match arrows_out.len() {
                0 => return Err(GraphError::DeadEnd(v)),
                1 => {
                    if let (Some(key), Some(rows)) = (&arrows[arrows_out[0]].key, shape.decider_rows) {
                        if key.len() != rows {
                            return Err(GraphError::KeyLength { vertex: v, expected: rows, got: key.len() });
                        }
                    }
                    Outgoing::Single(arrows_out[0])
                }
                _ => {
                    let rows = shape.decider_rows.ok_or(GraphError::MissingDecider(v))?;
                    let mut keyed = BTreeMap::new();
                    let mut seen = BTreeSet::new();
                    for &a in arrows_out {
                        let key = arrows[a].key.clone().ok_or(GraphError::MissingKey { vertex: v, arrow: a })?;
                        if key.len() != rows {
                            return Err(GraphError::KeyLength { vertex: v, expected: rows, got: key.len() });
                        }
                        if !seen.insert(key.clone()) {
                            return Err(GraphError::DuplicateKey(v));
                        }
                        keyed.insert(key, a);
                    }
                    Outgoing::Keyed(keyed)
                }
            }
        };
        table.push(entry);
    }
    Ok(table)
}
