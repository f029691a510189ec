use crate::graph::GraphBuilder;
use crate::label::{CopyTag, HubLevel, Lane, NodeLabel};

use super::{
    add_crossings, add_side_nodes, bit_of, meta_for, BitInput, Construction, ConstructionParams, GadgetError,
    Instance, Polarity, Side,
};

/// Stretched instance without `L′`, with `R′`, and a `2P` hub path.
/// `sa[i] = 1` adds a length-`P` path `ℓ_i → ℓ_{k+1}`.
pub fn eccentricity_gadget(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let p = params.checked_p()?;
    let k = params.k;
    input.check(k as usize, Polarity::EdgeOnOne)?;
    let mut b = GraphBuilder::new(false);
    let none = CopyTag::None;
    let lane = Lane::Structural;

    for side in Side::BOTH {
        let owner = Some(side.owner());
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K, HubLevel::K1], none);
        let hk = side.hub(HubLevel::K);
        let hk1 = side.hub(HubLevel::K1);
        b.path(&hk, &hk1, 2 * p, lane, owner)?;
        for i in 0..k {
            let li = side.node(i);
            b.path(&li, &hk, p, lane, owner)?;
            for j in 0..w {
                b.path(&li, &side.bit_node(j, bit_of(i, j)), p, lane, owner)?;
            }
            if side == Side::Right {
                let prime = side.prime(i);
                b.node(prime.clone(), owner);
                b.path(&prime, &li, p, lane, owner)?;
            }
            if input.bit(side, i as usize) {
                b.path(&li, &hk1, p, Lane::Input, owner)?;
            }
        }
    }
    add_crossings(&mut b, w, none)?;
    b.edge(&NodeLabel::hub_l(HubLevel::K1), &NodeLabel::hub_r(HubLevel::K1))?;

    let meta = meta_for(Construction::Eccentricity, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}
