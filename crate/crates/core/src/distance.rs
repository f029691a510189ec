//! Exact distance oracle: BFS for unit weights, Dijkstra otherwise.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::graph::{Graph, GraphError, NodeId};
use crate::scalar::Weight;

/// Single-source distances; `None` marks an unreachable node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport<W: Weight = u32> {
    pub source: NodeId,
    pub dist: Vec<Option<W>>,
}

impl<W: Weight> DistanceReport<W> {
    pub fn get(&self, v: NodeId) -> Option<W> {
        self.dist[v]
    }

    /// First unreachable node in id order, if any.
    pub fn first_unreachable(&self) -> Option<NodeId> {
        self.dist.iter().position(Option::is_none)
    }

    /// Maximum distance, or a disconnection error naming the source and the
    /// first node it cannot reach.
    pub fn max_distance<G: Weight>(&self, g: &Graph<G>) -> Result<W, GraphError> {
        if let Some(v) = self.first_unreachable() {
            return Err(disconnected(g, self.source, v));
        }
        Ok(self.dist.iter().flatten().copied().max().unwrap_or_else(W::zero))
    }
}

fn disconnected<W: Weight>(g: &Graph<W>, a: NodeId, b: NodeId) -> GraphError {
    GraphError::Disconnected {
        a,
        b,
        a_label: g.label(a).to_string(),
        b_label: g.label(b).to_string(),
    }
}

/// Hop distances from `source` on an unweighted graph.
pub fn bfs_distances<W: Weight>(g: &Graph<W>, source: NodeId) -> Result<DistanceReport<W>, GraphError> {
    g.check_node(source)?;
    if g.is_weighted() {
        return Err(GraphError::Weighted);
    }
    let hops = bfs_hops(g, source);
    let dist = hops
        .into_iter()
        .map(|d| (d != u32::MAX).then(|| W::from_u64(d as u64)).flatten())
        .collect();
    Ok(DistanceReport { source, dist })
}

/// Raw BFS with `u32::MAX` for unreachable. Neighbors are visited in id order.
pub(crate) fn bfs_hops<W: Weight>(g: &Graph<W>, source: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.n()];
    let mut queue = VecDeque::with_capacity(g.n());
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &(v, _) in g.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Weighted shortest-path distances from `source`. Unweighted graphs are
/// treated as unit-weighted.
pub fn dijkstra_distances<W: Weight>(g: &Graph<W>, source: NodeId) -> Result<DistanceReport<W>, GraphError> {
    g.check_node(source)?;
    let mut dist: Vec<Option<W>> = vec![None; g.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(W::zero());
    heap.push(Reverse((W::zero(), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(v, e) in g.neighbors(u) {
            let w = g.weight(e);
            if w.is_zero() {
                let (a, b) = g.edge(e);
                return Err(GraphError::NonPositiveWeight { u: a, v: b });
            }
            let cand = d.checked_add(&w).ok_or(GraphError::DistanceOverflow)?;
            if dist[v].is_none_or(|cur| cand < cur) {
                dist[v] = Some(cand);
                heap.push(Reverse((cand, v)));
            }
        }
    }
    Ok(DistanceReport { source, dist })
}

/// BFS when unweighted, Dijkstra otherwise.
pub fn distances<W: Weight>(g: &Graph<W>, source: NodeId) -> Result<DistanceReport<W>, GraphError> {
    if g.is_weighted() {
        dijkstra_distances(g, source)
    } else {
        bfs_distances(g, source)
    }
}

pub fn eccentricity<W: Weight>(g: &Graph<W>, u: NodeId) -> Result<W, GraphError> {
    g.check_node(u)?;
    if g.is_weighted() {
        return dijkstra_distances(g, u)?.max_distance(g);
    }
    let hops = bfs_hops(g, u);
    let mut best = 0;
    for (v, &d) in hops.iter().enumerate() {
        if d == u32::MAX {
            return Err(disconnected(g, u, v));
        }
        best = best.max(d);
    }
    W::from_u64(best as u64).ok_or(GraphError::DistanceOverflow)
}

/// Eccentricity of every node, computed in parallel by source.
pub fn eccentricities<W: Weight>(g: &Graph<W>) -> Result<Vec<W>, GraphError> {
    if g.n() == 0 {
        return Ok(Vec::new());
    }
    (0..g.n()).into_par_iter().map(|u| eccentricity(g, u)).collect()
}

pub fn diameter<W: Weight>(g: &Graph<W>) -> Result<W, GraphError> {
    Ok(eccentricities(g)?.into_iter().max().unwrap_or_else(W::zero))
}

pub fn radius<W: Weight>(g: &Graph<W>) -> Result<W, GraphError> {
    Ok(eccentricities(g)?.into_iter().min().unwrap_or_else(W::zero))
}

/// Distance rows from every source, in parallel. Quadratic memory.
pub fn all_pairs<W: Weight>(g: &Graph<W>) -> Result<Vec<DistanceReport<W>>, GraphError> {
    (0..g.n()).into_par_iter().map(|s| distances(g, s)).collect()
}
