//! Compilation of ReLU networks into linear logical graphs.
//!
//! Vertices at layer `ℓ` correspond to the realized ReLU sign chambers of
//! layers `1..ℓ`; each carries the network's pre-activation map of the next
//! layer restricted to its chamber, which is affine on the input space. The
//! vertices below the logit layer branch on the pairwise logit differences
//! and route to the sink of the winning class.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dag::{Arrow, VertexId};
use super::fuzzy::{ArrowMap, FuzzyLinearLogicalGraph, FuzzyVertex};
use super::llg::{LinearLogicalGraph, Vertex};
use super::{GraphError, Sign, SignPattern};
use crate::affine::AffineMap;
use crate::lp::{chamber_nonempty, Bounds, HalfSpace};
use crate::mlp::{Activation, Head, MlpSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscoveryMode {
    /// Exhaustive when every layer is at most `width_cap` wide, sampling
    /// otherwise.
    Auto,
    /// Enumerate sign patterns layer by layer, keeping those whose chamber
    /// is nonempty.
    Exhaustive,
    /// Keep the patterns hit by seeded random samples.
    Sampling,
}

/// How realized chambers are found during compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub mode: DiscoveryMode,
    pub width_cap: usize,
    pub samples: usize,
    pub seed: u64,
    /// Restricts chambers to the box `[lo, hi]^n`. `None` means all of `R^n`.
    pub domain: Option<Bounds>,
    /// Box sampled when `domain` is unbounded.
    pub sampling_box: Bounds,
    /// Upper bound on the number of graph vertices.
    pub max_vertices: usize,
    pub tolerance: f64,
}

impl Default for Discovery {
    fn default() -> Self {
        Self {
            mode: DiscoveryMode::Auto,
            width_cap: 12,
            samples: 100_000,
            seed: 0,
            domain: None,
            sampling_box: Bounds { lo: -1.0, hi: 1.0 },
            max_vertices: 100_000,
            tolerance: 1e-9,
        }
    }
}

impl Discovery {
    fn uses_sampling(&self, mlp: &MlpSpec) -> bool {
        match self.mode {
            DiscoveryMode::Exhaustive => false,
            DiscoveryMode::Sampling => true,
            DiscoveryMode::Auto => {
                let k = mlp.output_dim();
                let widest = mlp.layers().iter().map(AffineMap::rows).max().unwrap_or(0);
                widest.max(k * k.saturating_sub(1) / 2) > self.width_cap
            }
        }
    }
}

/// Compiles an index-max ReLU network into a linear logical graph computing
/// the same classifier (lowest index on ties).
pub fn compile_mlp(mlp: &MlpSpec, discovery: &Discovery) -> Result<LinearLogicalGraph, GraphError> {
    if mlp.head() != Head::IndexMax {
        return Err(GraphError::HeadMismatch { expected: Head::IndexMax });
    }
    let tree = ChamberTree::build(mlp, discovery, false)?;
    let k = mlp.output_dim();
    let vocab: Vec<String> = (0..k).map(|i| i.to_string()).collect();

    let mut vertices = Vec::with_capacity(tree.nodes.len());
    let mut arrows = Vec::new();
    let mut sinks: BTreeMap<usize, VertexId> = BTreeMap::new();
    for node in &tree.nodes {
        vertices.push(Vertex::Branch {
            decider: (node.children.len() > 1).then(|| node.decider.clone()),
            layer: node.layer,
        });
    }
    for (id, node) in tree.nodes.iter().enumerate() {
        for (pattern, child) in &node.children {
            let target = match child {
                Child::Node(c) => *c,
                Child::Class(label) => *sinks.entry(*label).or_insert_with(|| {
                    vertices.push(Vertex::Sink { label: *label });
                    vertices.len() - 1
                }),
            };
            arrows.push(Arrow { source: id, target, key: Some(pattern.clone()) });
        }
    }
    if vertices.len() > discovery.max_vertices {
        return Err(GraphError::RegionBudgetExceeded { limit: discovery.max_vertices });
    }
    LinearLogicalGraph::new(mlp.input_dim(), vertices, arrows, 0, vocab)
}

/// Compiles a softmax ReLU network into a fuzzy linear logical graph.
///
/// The chamber skeleton is the one of [`compile_mlp`] down to the last
/// hidden layer; every vertex there sends a single arrow carrying
/// `SoftMax ∘ (restricted logits)` into the one sink. All other arrows are
/// identities on `(S^1)^n`.
pub fn compile_mlp_fuzzy(mlp: &MlpSpec, discovery: &Discovery) -> Result<FuzzyLinearLogicalGraph, GraphError> {
    if mlp.head() != Head::Softmax {
        return Err(GraphError::HeadMismatch { expected: Head::Softmax });
    }
    let tree = ChamberTree::build(mlp, discovery, true)?;
    let n = mlp.input_dim();
    let k = mlp.output_dim();
    let sink = tree.nodes.len();
    if sink + 1 > discovery.max_vertices {
        return Err(GraphError::RegionBudgetExceeded { limit: discovery.max_vertices });
    }

    let mut vertices = Vec::with_capacity(sink + 1);
    let mut arrows = Vec::new();
    let mut maps = Vec::new();
    for node in &tree.nodes {
        let leaf = node.children.is_empty();
        vertices.push(FuzzyVertex {
            state_space: vec![1; n],
            decider: (node.children.len() > 1).then(|| node.decider.clone()),
            sink: false,
            layer: node.layer,
        });
        if leaf {
            // leaf nodes carry the restricted logit map as their decider
            maps.push(ArrowMap::AffineSoftmax { map: node.decider.clone() });
            arrows.push(Arrow { source: vertices.len() - 1, target: sink, key: None });
        }
    }
    for (id, node) in tree.nodes.iter().enumerate() {
        for (pattern, child) in &node.children {
            let Child::Node(c) = child else { unreachable!("fuzzy trees stop above the classes") };
            maps.push(ArrowMap::Identity);
            arrows.push(Arrow { source: id, target: *c, key: Some(pattern.clone()) });
        }
    }
    vertices.push(FuzzyVertex { state_space: vec![k - 1], decider: None, sink: true, layer: tree.depth });
    let vocab = (0..k).map(|i| i.to_string()).collect();
    FuzzyLinearLogicalGraph::new(vertices, arrows, maps, 0, vocab)
}

enum Child {
    Node(usize),
    Class(usize),
}

struct Node {
    layer: u32,
    decider: AffineMap,
    children: Vec<(SignPattern, Child)>,
}

/// Realized chambers, layer by layer, before conversion to a graph.
struct ChamberTree {
    nodes: Vec<Node>,
    depth: u32,
}

struct Expansion<'a> {
    mlp: &'a MlpSpec,
    discovery: &'a Discovery,
    fuzzy: bool,
    /// Per-sample sign patterns of every decider along its path; `None` in
    /// exhaustive mode.
    samples: Option<Vec<Vec<SignPattern>>>,
    nodes: Vec<Node>,
}

impl ChamberTree {
    fn build(mlp: &MlpSpec, discovery: &Discovery, fuzzy: bool) -> Result<Self, GraphError> {
        if mlp.layers().len() > 1 && mlp.hidden_activation() != Activation::Relu {
            return Err(GraphError::NonReluActivation(mlp.hidden_activation()));
        }
        if mlp.output_dim() == 0 {
            return Err(GraphError::EmptyVocab);
        }
        let samples = discovery.uses_sampling(mlp).then(|| sample_paths(mlp, discovery));
        let mut ex = Expansion { mlp, discovery, fuzzy, samples, nodes: Vec::new() };
        let members: Vec<usize> = match &ex.samples {
            Some(s) => (0..s.len()).collect(),
            None => Vec::new(),
        };
        ex.expand(0, mlp.layers()[0].clone(), Vec::new(), members)?;
        let n = mlp.layers().len() as u32;
        Ok(ChamberTree { nodes: ex.nodes, depth: if fuzzy { n } else { n + 1 } })
    }
}

impl Expansion<'_> {
    /// Adds the vertex at `layer` whose chamber is `constraints` and whose
    /// carried map is `map`, then recurses into its realized sub-chambers.
    fn expand(
        &mut self,
        layer: usize,
        map: AffineMap,
        constraints: Vec<HalfSpace>,
        members: Vec<usize>,
    ) -> Result<usize, GraphError> {
        let depth = self.mlp.layers().len();
        let id = self.nodes.len();
        if id >= self.discovery.max_vertices {
            return Err(GraphError::RegionBudgetExceeded { limit: self.discovery.max_vertices });
        }
        let classify = layer == depth;
        let decider = if classify { map.pairwise_differences() } else { map.clone() };
        self.nodes.push(Node { layer: layer as u32, decider: decider.clone(), children: Vec::new() });
        if self.fuzzy && layer + 1 == depth {
            return Ok(id);
        }

        let realized = self.realized_patterns(layer, &decider, &constraints, &members);
        let mut children = Vec::with_capacity(realized.len());
        for (pattern, sub_members) in realized {
            if classify {
                if let Some(label) = winner(&pattern, self.mlp.output_dim()) {
                    children.push((pattern, Child::Class(label)));
                }
                continue;
            }
            let mut sub = constraints.clone();
            sub.extend(halfspaces(&decider, &pattern));
            let next_map = if layer + 1 < depth {
                self.mlp.layers()[layer + 1].compose(&map.masked(&pattern.relu_mask()))
            } else {
                // logits: no activation follows
                map.clone()
            };
            let child = self.expand(layer + 1, next_map, sub, sub_members)?;
            children.push((pattern, Child::Node(child)));
        }
        self.nodes[id].children = children;
        Ok(id)
    }

    fn realized_patterns(
        &self,
        layer: usize,
        decider: &AffineMap,
        constraints: &[HalfSpace],
        members: &[usize],
    ) -> Vec<(SignPattern, Vec<usize>)> {
        match &self.samples {
            Some(paths) => {
                let mut groups: BTreeMap<SignPattern, Vec<usize>> = BTreeMap::new();
                for &m in members {
                    groups.entry(paths[m][layer].clone()).or_default().push(m);
                }
                groups.into_iter().collect()
            }
            None => {
                let dim = self.mlp.input_dim();
                let mut found = Vec::new();
                let mut prefix = Vec::with_capacity(decider.rows());
                let mut active = constraints.to_vec();
                enumerate_chambers(decider, dim, self.discovery, &mut prefix, &mut active, &mut found);
                found.into_iter().map(|p| (p, Vec::new())).collect()
            }
        }
    }
}

/// Depth-first enumeration of the sign patterns of `decider` realized inside
/// the chamber `active`, pruning infeasible prefixes.
fn enumerate_chambers(
    decider: &AffineMap,
    dim: usize,
    discovery: &Discovery,
    prefix: &mut Vec<Sign>,
    active: &mut Vec<HalfSpace>,
    found: &mut Vec<SignPattern>,
) {
    let r = prefix.len();
    if r == decider.rows() {
        found.push(SignPattern::new(prefix.clone()));
        return;
    }
    for sign in [Sign::NonNeg, Sign::Neg] {
        active.push(HalfSpace { normal: decider.row(r).to_vec(), offset: decider.bias()[r], nonneg: sign.is_nonneg() });
        if chamber_nonempty(active, dim, discovery.domain, discovery.tolerance) {
            prefix.push(sign);
            enumerate_chambers(decider, dim, discovery, prefix, active, found);
            prefix.pop();
        }
        active.pop();
    }
}

fn halfspaces<'a>(decider: &'a AffineMap, pattern: &SignPattern) -> impl Iterator<Item = HalfSpace> + 'a {
    let signs: Vec<Sign> = pattern.signs().to_vec();
    decider.row_iter().zip(decider.bias()).zip(signs).map(|((row, b), s)| HalfSpace {
        normal: row.to_vec(),
        offset: *b,
        nonneg: s.is_nonneg(),
    })
}

/// Class selected by a pattern over the pairwise differences `l_i - l_j`
/// (`i < j`): the lowest index `i` with `l_i ≥ l_j` for all later `j` and
/// `l_h < l_i` for all earlier `h`. Inconsistent patterns have no winner.
pub(crate) fn winner(pattern: &SignPattern, k: usize) -> Option<usize> {
    let signs = pattern.signs();
    let pair = |i: usize, j: usize| i * k - i * (i + 1) / 2 + (j - i - 1);
    (0..k).find(|&i| {
        ((i + 1)..k).all(|j| signs[pair(i, j)].is_nonneg()) && (0..i).all(|h| !signs[pair(h, i)].is_nonneg())
    })
}

/// Sign patterns met by each random sample: one per hidden layer, then the
/// logit signs, then the pairwise logit differences.
fn sample_paths(mlp: &MlpSpec, discovery: &Discovery) -> Vec<Vec<SignPattern>> {
    let Bounds { lo, hi } = discovery.domain.unwrap_or(discovery.sampling_box);
    let mut rng = ChaCha8Rng::seed_from_u64(discovery.seed);
    let last = mlp.layers().len() - 1;
    (0..discovery.samples)
        .map(|_| {
            let mut h: Vec<f64> = (0..mlp.input_dim()).map(|_| rng.gen_range(lo..=hi)).collect();
            let mut path = Vec::with_capacity(last + 2);
            for (i, layer) in mlp.layers().iter().enumerate() {
                h = layer.apply(&h);
                path.push(SignPattern::of_values(&h));
                if i != last {
                    h.iter_mut().for_each(|v| *v = v.max(0.0));
                }
            }
            let k = h.len();
            let mut diffs = Vec::with_capacity(k * k.saturating_sub(1) / 2);
            for i in 0..k {
                for j in (i + 1)..k {
                    diffs.push(h[i] - h[j]);
                }
            }
            path.push(SignPattern::of_values(&diffs));
            path
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winner_follows_lowest_index_tie_break() {
        // k = 3, pairs (0,1), (0,2), (1,2)
        let p = |s: &str| s.parse::<SignPattern>().unwrap();
        assert_eq!(winner(&p("+++"), 3), Some(0));
        assert_eq!(winner(&p("-++"), 3), Some(1));
        assert_eq!(winner(&p("--+"), 3), Some(1));
        assert_eq!(winner(&p("+--"), 3), Some(2));
        assert_eq!(winner(&p("---"), 3), Some(2));
        // l0 ≥ l1, l2 > l0, l1 ≥ l2 is cyclic
        assert_eq!(winner(&p("+-+"), 3), None);
        assert_eq!(winner(&SignPattern::default(), 1), Some(0));
    }
}
