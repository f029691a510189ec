use std::collections::BTreeSet;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::label::{NodeLabel, Role};
use crate::scalar::{ceil_log2, Weight};

use super::GadgetError;

/// Replaces the edges `edge_subset` at `v` by a balanced binary tree rooted at
/// `v` whose leaves are the former neighbors.
///
/// The tree has height `ceil(log2 y)` and its first `y` leaf slots hold the
/// neighbors in id order; subtrees without neighbors are not created. New
/// nodes are labelled `tr(v, t, position)` with `t` the first tree id not yet
/// used at `v`. A leaf edge keeps the weight of the edge it replaces; interior
/// tree edges have weight 1.
pub fn degree_reduce<W: Weight>(g: &Graph<W>, v: NodeId, edge_subset: &[EdgeId]) -> Result<Graph<W>, GadgetError> {
    g.check_node(v)?;
    let mut chosen = BTreeSet::new();
    for &e in edge_subset {
        if e >= g.edge_count() {
            return Err(GadgetError::NotIncident(e));
        }
        let (a, b) = g.edge(e);
        if a != v && b != v {
            return Err(GadgetError::NotIncident(e));
        }
        if !chosen.insert(e) {
            return Err(GadgetError::DuplicateEdge(e));
        }
    }
    let y = chosen.len();
    if y < 3 {
        return Err(GadgetError::TooFewEdges(y));
    }

    let root = g.label(v).clone();
    let tree_id = g
        .labels()
        .iter()
        .filter_map(|l| match &l.role {
            Role::TreeNode { root: r, tree, .. } if **r == root => Some(tree + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);

    // (neighbor, weight) in neighbor id order.
    let mut leaves: Vec<(NodeId, W)> = chosen
        .iter()
        .map(|&e| {
            let (a, b) = g.edge(e);
            (if a == v { b } else { a }, g.weight(e))
        })
        .collect();
    leaves.sort_unstable_by_key(|&(u, _)| u);

    let height = ceil_log2(y as u64);
    let width = 1usize << height;
    let mut occupied = vec![false; 2 * width];
    for s in 0..y {
        occupied[width + s] = true;
    }
    for pos in (1..width).rev() {
        occupied[pos] = occupied[2 * pos] || occupied[2 * pos + 1];
    }
    let inner = |pos: usize| -> NodeLabel {
        if pos == 1 {
            root.clone()
        } else {
            NodeLabel::tree_node(&root, tree_id, pos as u32)
        }
    };

    let mut labels = g.labels().to_vec();
    let mut edges: Vec<(NodeLabel, NodeLabel, W)> = g
        .labeled_edges()
        .into_iter()
        .enumerate()
        .filter(|(e, _)| !chosen.contains(e))
        .map(|(_, edge)| edge)
        .collect();
    for pos in 2..2 * width {
        if !occupied[pos] {
            continue;
        }
        let parent = inner(pos / 2);
        if pos < width {
            let child = inner(pos);
            labels.push(child.clone());
            edges.push((parent, child, W::one()));
        } else {
            let (u, weight) = leaves[pos - width];
            edges.push((parent, g.label(u).clone(), weight));
        }
    }
    Ok(Graph::from_labeled_edges(labels, &edges, g.is_weighted())?)
}
