use crate::graph::{GraphBuilder, Owner};
use crate::label::{CopyTag, HubLevel, Lane, NodeLabel};
use crate::scalar::exact_log2;

use super::{
    add_crossings, add_side_nodes, bit_of, meta_for, BitInput, Construction, ConstructionParams, GadgetError,
    Instance, Polarity, Side,
};

/// Bounded-degree radius instance. Requires `k = 2^w` with `w` a power of two
/// and `k >= 16`.
///
/// Every high-degree star of the unstretched radius instance is replaced by a
/// binary tree, so that `ℓ_i` reaches `ℓ_k`, `ℓ_{k+1}` and each of its bit
/// nodes in exactly `w + log2 w - 1` hops. `sa[i] = 0` removes the last edge
/// `(ℓ_i, q(ℓ_i))` of the tail towards `ℓ_{k+1}`.
pub fn radius_const_degree(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let ww = exact_log2(w as u64)
        .filter(|&ww| ww >= 2)
        .ok_or(GadgetError::BadConstDegreeK(params.k))?;
    let k = params.k;
    input.check(k as usize, Polarity::RemoveOnZero)?;
    let mut b = GraphBuilder::new(false);
    let none = CopyTag::None;
    let lane = Lane::Structural;

    for side in Side::BOTH {
        let owner = Some(side.owner());
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K, HubLevel::K1], none);
        b.edge(&side.hub(HubLevel::K), &side.hub(HubLevel::K1))?;
        for j in 0..w {
            b.edge(&side.bit_node(j, false), &side.bit_node(j, true))?;
        }

        // Tree below ℓ_i of height log2 w, cut off one level above its leaves.
        // Heap position (w + j) / 2 is the attachment point for bit j.
        let attach = |i: u32, j: u32| NodeLabel::tree_node(&side.node(i), 0, (w + j) / 2);
        for i in 0..k {
            let root = side.node(i);
            for pos in 2..w {
                let child = NodeLabel::tree_node(&root, 0, pos);
                let parent = if pos / 2 == 1 {
                    root.clone()
                } else {
                    NodeLabel::tree_node(&root, 0, pos / 2)
                };
                b.node(child.clone(), owner);
                b.edge(&parent, &child)?;
            }
        }
        for j in 0..w {
            for value in [false, true] {
                let slots: Vec<Option<NodeLabel>> = (0..k)
                    .map(|i| (bit_of(i, j) == value).then(|| attach(i, j)))
                    .collect();
                b.slot_tree(&side.bit_node(j, value), 0, w, &slots, owner)?;
            }
        }

        // Hub trees of height w, then a tail of log2 w - 1 edges to each ℓ_i.
        for level in [HubLevel::K, HubLevel::K1] {
            let hub = side.hub(level);
            let leaves: Vec<NodeLabel> = (0..k).map(|i| NodeLabel::tree_node(&hub, 0, k + i)).collect();
            for leaf in &leaves {
                b.node(leaf.clone(), owner);
            }
            let slots: Vec<Option<NodeLabel>> = leaves.iter().cloned().map(Some).collect();
            b.slot_tree(&hub, 0, w, &slots, owner)?;
            let tail = ww - 1;
            for (i, leaf) in (0..k).zip(&leaves) {
                let li = side.node(i);
                if level == HubLevel::K {
                    b.path(leaf, &li, tail, lane, owner)?;
                    continue;
                }
                let mut q = leaf.clone();
                for step in 1..tail {
                    let next = NodeLabel::path_node(leaf, &li, lane, step, tail);
                    b.node(next.clone(), owner);
                    b.edge(&q, &next)?;
                    q = next;
                }
                if input.bit(side, i as usize) {
                    b.input_edge(&q, &li)?;
                }
            }
        }
    }

    let alice = Some(Owner::Alice);
    let x1 = NodeLabel::x(1);
    let x2 = NodeLabel::x(2);
    b.node(x1.clone(), alice);
    b.node(x2.clone(), alice);
    let slots: Vec<Option<NodeLabel>> = (0..k).map(|i| Some(NodeLabel::l(i))).collect();
    b.slot_tree(&x1, 0, w, &slots, alice)?;
    b.path(&x1, &x2, w + 2 * ww - 1, lane, alice)?;

    add_crossings(&mut b, w, none)?;
    b.edge(&NodeLabel::hub_l(HubLevel::K1), &NodeLabel::hub_r(HubLevel::K1))?;

    let meta = meta_for(Construction::RadiusConstDegree, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}
