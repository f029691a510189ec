//! Undirected graphs with canonical node ids and optional integer weights.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Lane, NodeLabel};
use crate::scalar::{Rational, Weight};

pub type NodeId = usize;
pub type EdgeId = usize;

/// The player simulating a node in the two-party reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Owner {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

impl Owner {
    pub fn other(self) -> Owner {
        match self {
            Owner::Alice => Owner::Bob,
            Owner::Bob => Owner::Alice,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("parallel edge {0} -- {1}")]
    ParallelEdge(String, String),
    #[error("edge endpoint {0} is not a node")]
    UnknownNode(String),
    #[error("duplicate node label {0}")]
    DuplicateLabel(String),
    #[error("node ids are not in canonical label order at id {0}")]
    NotCanonical(NodeId),
    #[error("non-positive weight on edge {u} -- {v}")]
    NonPositiveWeight { u: NodeId, v: NodeId },
    #[error("path length must be at least 1")]
    EmptyPath,
    #[error("operation requires an unweighted graph")]
    Weighted,
    #[error("graph is disconnected: {a_label} (id {a}) cannot reach {b_label} (id {b})")]
    Disconnected {
        a: NodeId,
        b: NodeId,
        a_label: String,
        b_label: String,
    },
    #[error("distance overflow in the weight type")]
    DistanceOverflow,
    #[error("edge {0} -- {1} not present")]
    MissingEdge(NodeId, NodeId),
}

/// Immutable undirected graph.
///
/// Node ids follow the canonical order of their labels; edges are stored as
/// `(u, v)` with `u < v`, sorted; adjacency lists are sorted by neighbor id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<W: Weight = u32> {
    labels: Vec<NodeLabel>,
    edges: Vec<(NodeId, NodeId)>,
    weights: Option<Vec<W>>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
}

impl<W: Weight> Graph<W> {
    /// Builds a graph from labels and label-addressed edges. Ids are assigned
    /// by canonical label order regardless of input order.
    pub fn from_labeled_edges(
        mut labels: Vec<NodeLabel>,
        edges: &[(NodeLabel, NodeLabel, W)],
        weighted: bool,
    ) -> Result<Self, GraphError> {
        labels.sort();
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateLabel(pair[0].to_string()));
            }
        }
        let lookup = |l: &NodeLabel| {
            labels
                .binary_search(l)
                .map_err(|_| GraphError::UnknownNode(l.to_string()))
        };
        let mut raw = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            raw.push((lookup(a)?, lookup(b)?, *w));
        }
        Self::from_id_edges(labels, raw, weighted)
    }

    /// Builds a graph whose ids are already canonical (labels sorted).
    pub fn from_id_edges(
        labels: Vec<NodeLabel>,
        edges: Vec<(NodeId, NodeId, W)>,
        weighted: bool,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        for (i, pair) in labels.windows(2).enumerate() {
            if pair[0] >= pair[1] {
                return Err(GraphError::NotCanonical(i + 1));
            }
        }
        let mut normalized: Vec<(NodeId, NodeId, W)> = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(labels[u].to_string()));
            }
            if w.is_zero() {
                return Err(GraphError::NonPositiveWeight { u, v });
            }
            normalized.push((u.min(v), u.max(v), w));
        }
        normalized.sort_by_key(|&(u, v, _)| (u, v));
        for pair in normalized.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(GraphError::ParallelEdge(
                    labels[pair[0].0].to_string(),
                    labels[pair[0].1].to_string(),
                ));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(u, v, _)) in normalized.iter().enumerate() {
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let weights = weighted.then(|| normalized.iter().map(|&(_, _, w)| w).collect());
        let edges = normalized.into_iter().map(|(u, v, _)| (u, v)).collect();
        Ok(Graph {
            labels,
            edges,
            weights,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label(&self, u: NodeId) -> &NodeLabel {
        &self.labels[u]
    }

    pub fn id_of(&self, label: &NodeLabel) -> Option<NodeId> {
        self.labels.binary_search(label).ok()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of edge `e`; 1 when the graph is unweighted.
    pub fn weight(&self, e: EdgeId) -> W {
        self.weights.as_ref().map_or_else(W::one, |w| w[e])
    }

    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let list = self.adjacency.get(u)?;
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if u < self.n() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: u, n: self.n() })
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff `edge_count <= c * n * log2(n)`, decided exactly.
    pub fn sparsity_check(&self, c: Rational) -> bool {
        sparsity_holds(self.edge_count() as u64, self.n() as u64, c)
    }

    /// Same node set, keeping only the edges with `keep[e]`.
    pub fn edge_subgraph(&self, keep: &[bool]) -> Graph<W> {
        assert_eq!(keep.len(), self.edge_count());
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| keep[e])
            .map(|(e, &(u, v))| (u, v, self.weight(e)))
            .collect();
        Graph::from_id_edges(self.labels.clone(), edges, self.is_weighted())
            .expect("subgraph of a valid graph is valid")
    }

    /// Label-addressed edge list, the input form of [`Graph::from_labeled_edges`].
    pub fn labeled_edges(&self) -> Vec<(NodeLabel, NodeLabel, W)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| (self.labels[u].clone(), self.labels[v].clone(), self.weight(e)))
            .collect()
    }
}

/// `m <= c * n * log2(n)` without floating point: with `m / (c n) = p / q`
/// in lowest terms this is `2^p <= n^q`.
pub fn sparsity_holds(m: u64, n: u64, c: Rational) -> bool {
    if m == 0 {
        return true;
    }
    if n <= 1 || c <= Rational::from_integer(0) {
        return false;
    }
    let ratio = Rational::new(m as i64, 1) / (c * Rational::from_integer(n as i64));
    let (p, q) = (*ratio.numer() as u64, *ratio.denom() as u64);
    // Cheap bracket on floor(log2 n) before the exact power comparison.
    let floor_log = 63 - n.leading_zeros() as u64;
    if p <= q.saturating_mul(floor_log) {
        return true;
    }
    if p > q.saturating_mul(floor_log + 1) {
        return false;
    }
    let lhs = BigUint::from(1u8) << (p as usize);
    let rhs = BigUint::from(n).pow(q as u32);
    lhs <= rhs
}

/// Label-addressed incremental builder used by the constructions.
#[derive(Clone, Debug)]
pub struct GraphBuilder<W: Weight = u32> {
    nodes: BTreeMap<NodeLabel, Option<Owner>>,
    edges: BTreeMap<(NodeLabel, NodeLabel), EdgeInfo<W>>,
    weighted: bool,
}

#[derive(Clone, Copy, Debug)]
struct EdgeInfo<W> {
    weight: W,
    input: bool,
}

/// Output of [`GraphBuilder::finish`].
#[derive(Clone, Debug)]
pub struct Built<W: Weight> {
    pub graph: Graph<W>,
    pub owners: Vec<Option<Owner>>,
    pub input_edges: Vec<EdgeId>,
}

impl<W: Weight> Default for GraphBuilder<W> {
    fn default() -> Self {
        Self::new(false)
    }
}

impl<W: Weight> GraphBuilder<W> {
    pub fn new(weighted: bool) -> Self {
        GraphBuilder {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            weighted,
        }
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn node(&mut self, label: NodeLabel, owner: Option<Owner>) -> &mut Self {
        self.nodes.insert(label, owner);
        self
    }

    pub fn has_node(&self, label: &NodeLabel) -> bool {
        self.nodes.contains_key(label)
    }

    pub fn owner(&self, label: &NodeLabel) -> Option<Owner> {
        self.nodes.get(label).copied().flatten()
    }

    fn key(a: &NodeLabel, b: &NodeLabel) -> (NodeLabel, NodeLabel) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    fn insert_edge(&mut self, a: &NodeLabel, b: &NodeLabel, weight: W, input: bool) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        if weight.is_zero() {
            return Err(GraphError::NonPositiveWeight { u: 0, v: 0 });
        }
        let key = Self::key(a, b);
        if self.edges.contains_key(&key) {
            return Err(GraphError::ParallelEdge(a.to_string(), b.to_string()));
        }
        self.edges.insert(key, EdgeInfo { weight, input });
        Ok(())
    }

    pub fn edge(&mut self, a: &NodeLabel, b: &NodeLabel) -> Result<(), GraphError> {
        self.insert_edge(a, b, W::one(), false)
    }

    pub fn weighted_edge(&mut self, a: &NodeLabel, b: &NodeLabel, weight: W) -> Result<(), GraphError> {
        self.insert_edge(a, b, weight, false)
    }

    pub fn input_edge(&mut self, a: &NodeLabel, b: &NodeLabel) -> Result<(), GraphError> {
        self.insert_edge(a, b, W::one(), true)
    }

    pub fn remove_edge(&mut self, a: &NodeLabel, b: &NodeLabel) -> bool {
        self.edges.remove(&Self::key(a, b)).is_some()
    }

    pub fn has_edge(&self, a: &NodeLabel, b: &NodeLabel) -> bool {
        self.edges.contains_key(&Self::key(a, b))
    }

    /// Connects `a` and `b` by a path of `len` unit edges. Interior nodes are
    /// path nodes owned by `owner`; a length-1 path is a direct edge.
    pub fn path(
        &mut self,
        a: &NodeLabel,
        b: &NodeLabel,
        len: u32,
        lane: Lane,
        owner: Option<Owner>,
    ) -> Result<(), GraphError> {
        if len == 0 {
            return Err(GraphError::EmptyPath);
        }
        let input = lane == Lane::Input;
        let mut prev = a.clone();
        for step in 1..len {
            let node = NodeLabel::path_node(a, b, lane, step, len);
            self.node(node.clone(), owner);
            self.insert_edge(&prev, &node, W::one(), input)?;
            prev = node;
        }
        self.insert_edge(&prev, b, W::one(), input)
    }

    /// A length-`len` link: a unit path when unweighted, a single edge of
    /// weight `len` when the builder is weighted.
    pub fn link(
        &mut self,
        a: &NodeLabel,
        b: &NodeLabel,
        len: u32,
        lane: Lane,
        owner: Option<Owner>,
    ) -> Result<(), GraphError> {
        if self.weighted {
            if len == 0 {
                return Err(GraphError::EmptyPath);
            }
            let w = W::from_u64(len as u64).ok_or(GraphError::DistanceOverflow)?;
            self.insert_edge(a, b, w, lane == Lane::Input)
        } else {
            self.path(a, b, len, lane, owner)
        }
    }

    /// Binary tree of exact height `height` rooted at `root`, replacing direct
    /// edges from `root` to existing nodes.
    ///
    /// `slots` has `2^height` entries in left-to-right leaf order; `Some(x)`
    /// places the existing node `x` at that leaf position, `None` leaves it
    /// empty. Internal heap positions with no occupied leaf below them are not
    /// created. Created nodes are `TreeNode(root, tree, position)`.
    pub fn slot_tree(
        &mut self,
        root: &NodeLabel,
        tree: u32,
        height: u32,
        slots: &[Option<NodeLabel>],
        owner: Option<Owner>,
    ) -> Result<(), GraphError> {
        let width = 1usize << height;
        assert_eq!(slots.len(), width, "slot count must be 2^height");
        // occupied[pos] for heap positions 1..2*width.
        let mut occupied = vec![false; 2 * width];
        for (s, slot) in slots.iter().enumerate() {
            occupied[width + s] = slot.is_some();
        }
        for pos in (1..width).rev() {
            occupied[pos] = occupied[2 * pos] || occupied[2 * pos + 1];
        }
        let label_at = |pos: usize| -> Option<NodeLabel> {
            if pos == 1 {
                Some(root.clone())
            } else if pos >= width {
                slots[pos - width].clone()
            } else {
                Some(NodeLabel::tree_node(root, tree, pos as u32))
            }
        };
        for pos in 2..2 * width {
            if !occupied[pos] {
                continue;
            }
            let child = label_at(pos).expect("occupied position has a label");
            if pos < width {
                self.node(child.clone(), owner);
            }
            let parent = label_at(pos / 2).expect("parent of occupied is occupied");
            self.edge(&parent, &child)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<Built<W>, GraphError> {
        let labels: Vec<NodeLabel> = self.nodes.keys().cloned().collect();
        let owners: Vec<Option<Owner>> = self.nodes.values().copied().collect();
        let lookup = |l: &NodeLabel| {
            labels
                .binary_search(l)
                .map_err(|_| GraphError::UnknownNode(l.to_string()))
        };
        let mut raw = Vec::with_capacity(self.edges.len());
        let mut input_pairs = Vec::new();
        for ((a, b), info) in &self.edges {
            let (u, v) = (lookup(a)?, lookup(b)?);
            raw.push((u, v, info.weight));
            if info.input {
                input_pairs.push((u.min(v), u.max(v)));
            }
        }
        let graph = Graph::from_id_edges(labels, raw, self.weighted)?;
        let mut input_edges: Vec<EdgeId> = input_pairs
            .into_iter()
            .map(|(u, v)| graph.find_edge(u, v).expect("edge was inserted"))
            .collect();
        input_edges.sort_unstable();
        Ok(Built {
            graph,
            owners,
            input_edges,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Role;

    fn numbered(n: u32) -> Vec<NodeLabel> {
        (0..n).map(NodeLabel::l).collect()
    }

    pub(crate) fn path_graph(n: u32) -> Graph {
        let labels = numbered(n);
        let edges: Vec<_> = (1..n)
            .map(|i| (NodeLabel::l(i - 1), NodeLabel::l(i), 1))
            .collect();
        Graph::from_labeled_edges(labels, &edges, false).unwrap()
    }

    fn complete(n: u32) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((NodeLabel::l(i), NodeLabel::l(j), 1));
            }
        }
        Graph::from_labeled_edges(numbered(n), &edges, false).unwrap()
    }

    #[test]
    fn ids_follow_canonical_order() {
        let labels = vec![NodeLabel::new(Role::A), NodeLabel::r(0), NodeLabel::l(2)];
        let g: Graph = Graph::from_labeled_edges(
            labels,
            &[(NodeLabel::new(Role::A), NodeLabel::l(2), 1)],
            false,
        )
        .unwrap();
        assert_eq!(g.label(0), &NodeLabel::l(2));
        assert_eq!(g.label(2), &NodeLabel::new(Role::A));
        assert_eq!(g.edges(), &[(0, 2)]);
    }

    #[test]
    fn rejects_self_loops_parallel_edges_and_zero_weights() {
        let labels = numbered(2);
        let a = NodeLabel::l(0);
        let b = NodeLabel::l(1);
        assert!(matches!(
            Graph::<u32>::from_labeled_edges(labels.clone(), &[(a.clone(), a.clone(), 1)], false),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            Graph::<u32>::from_labeled_edges(
                labels.clone(),
                &[(a.clone(), b.clone(), 1), (b.clone(), a.clone(), 1)],
                false
            ),
            Err(GraphError::ParallelEdge(..))
        ));
        assert!(matches!(
            Graph::<u32>::from_labeled_edges(labels, &[(a, b, 0)], true),
            Err(GraphError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn degrees() {
        let empty: Graph = Graph::from_labeled_edges(numbered(4), &[], false).unwrap();
        assert_eq!(empty.max_degree(), 0);
        assert_eq!(complete(4).max_degree(), 3);
        assert_eq!(path_graph(5).max_degree(), 2);
    }

    #[test]
    fn sparsity() {
        let tree = path_graph(10);
        assert_eq!(tree.edge_count(), 9);
        assert!(tree.sparsity_check(Rational::from_integer(1)));
        let k32 = complete(32);
        // 496 edges > 32 * 5
        assert!(!k32.sparsity_check(Rational::from_integer(1)));
        assert!(k32.sparsity_check(Rational::new(31, 10)));
        assert!(!k32.sparsity_check(Rational::new(30, 10)));
    }

    #[test]
    fn sparsity_exact_boundary() {
        // m = n log2 n exactly for n = 8: 24 edges.
        assert!(sparsity_holds(24, 8, Rational::from_integer(1)));
        assert!(!sparsity_holds(25, 8, Rational::from_integer(1)));
        // n = 3: log2 3 ≈ 1.58496; 3 * log2 3 ≈ 4.75
        assert!(sparsity_holds(4, 3, Rational::from_integer(1)));
        assert!(!sparsity_holds(5, 3, Rational::from_integer(1)));
        // c = 1/2, n = 6: 3 * log2 6 ≈ 7.75
        assert!(sparsity_holds(7, 6, Rational::new(1, 2)));
        assert!(!sparsity_holds(8, 6, Rational::new(1, 2)));
    }

    #[test]
    fn builder_paths_and_trees() {
        let mut b: GraphBuilder = GraphBuilder::new(false);
        let root = NodeLabel::x(1);
        b.node(root.clone(), Some(Owner::Alice));
        let leaves: Vec<_> = (0..3).map(NodeLabel::l).collect();
        for l in &leaves {
            b.node(l.clone(), Some(Owner::Alice));
        }
        let mut slots: Vec<Option<NodeLabel>> = leaves.iter().cloned().map(Some).collect();
        slots.push(None);
        b.slot_tree(&root, 0, 2, &slots, Some(Owner::Alice)).unwrap();
        b.path(&root, &NodeLabel::x(2), 3, Lane::Structural, Some(Owner::Bob))
            .unwrap();
        b.node(NodeLabel::x(2), Some(Owner::Bob));
        let built = b.finish().unwrap();
        let g = built.graph;
        // x1, x2, 3 leaves, 2 tree nodes, 2 path nodes
        assert_eq!(g.n(), 9);
        assert_eq!(g.edge_count(), 5 + 3);
        let x1 = g.id_of(&root).unwrap();
        assert_eq!(g.degree(x1), 3);
        assert!(built.input_edges.is_empty());
    }

    #[test]
    fn builder_rejects_duplicate_edges() {
        let mut b: GraphBuilder = GraphBuilder::new(false);
        b.node(NodeLabel::l(0), None).node(NodeLabel::l(1), None);
        b.edge(&NodeLabel::l(0), &NodeLabel::l(1)).unwrap();
        assert!(b.edge(&NodeLabel::l(1), &NodeLabel::l(0)).is_err());
    }

    #[test]
    fn find_edge_and_subgraph() {
        let g = path_graph(4);
        assert_eq!(g.find_edge(1, 2), Some(1));
        assert_eq!(g.find_edge(0, 2), None);
        let h = g.edge_subgraph(&[true, false, true]);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.n(), 4);
    }
}
