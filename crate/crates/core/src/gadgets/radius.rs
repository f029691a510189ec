use crate::graph::{GraphBuilder, GraphError};
use crate::label::{CopyTag, HubLevel, Lane, NodeLabel};
use crate::graph::Owner;

use super::{
    add_crossings, add_side_nodes, bit_of, meta_for, BitInput, Construction, ConstructionParams, GadgetError,
    Instance, Polarity, Side,
};

/// Unstretched radius instance. `sa[i] = 1` adds `(ℓ_i, ℓ_{k+1})`; in the
/// shaved variant bit `i·w + j` adds `(ℓ_i, ℓ^j_{k+1})`.
pub fn radius_exact(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let k = params.k;
    let construction = Construction::RadiusExact;
    input.check(construction.input_len(k, params.shaved), Polarity::EdgeOnOne)?;
    let mut b = GraphBuilder::new(false);
    let none = CopyTag::None;

    for side in Side::BOTH {
        let owner = Some(side.owner());
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K], none);
        let hk = side.hub(HubLevel::K);
        for j in 0..w {
            b.edge(&side.bit_node(j, false), &side.bit_node(j, true))?;
        }
        if params.shaved {
            for j in 0..w {
                b.node(side.split_hub(j), owner);
                b.edge(&hk, &side.split_hub(j))?;
            }
        } else {
            b.node(side.hub(HubLevel::K1), owner);
            b.edge(&hk, &side.hub(HubLevel::K1))?;
        }
        for i in 0..k {
            let li = side.node(i);
            b.edge(&li, &hk)?;
            for j in 0..w {
                b.edge(&li, &side.bit_node(j, bit_of(i, j)))?;
            }
            if params.shaved {
                for j in 0..w {
                    if input.bit(side, (i * w + j) as usize) {
                        b.input_edge(&li, &side.split_hub(j))?;
                    }
                }
            } else if input.bit(side, i as usize) {
                b.input_edge(&li, &side.hub(HubLevel::K1))?;
            }
        }
    }

    let alice = Some(Owner::Alice);
    for m in 1..=3 {
        b.node(NodeLabel::x(m), alice);
    }
    for i in 0..k {
        b.edge(&NodeLabel::x(1), &NodeLabel::l(i))?;
    }
    b.edge(&NodeLabel::x(1), &NodeLabel::x(2))?;
    b.edge(&NodeLabel::x(2), &NodeLabel::x(3))?;

    add_crossings(&mut b, w, none)?;
    add_hub_matching(&mut b, w, params.shaved, none)?;

    let meta = meta_for(construction, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}

fn add_hub_matching(b: &mut GraphBuilder<u32>, w: u32, shaved: bool, copy: CopyTag) -> Result<(), GraphError> {
    if shaved {
        for j in 0..w {
            b.edge(
                &Side::Left.split_hub(j).in_copy(copy),
                &Side::Right.split_hub(j).in_copy(copy),
            )?;
        }
        Ok(())
    } else {
        b.edge(
            &NodeLabel::hub_l(HubLevel::K1).in_copy(copy),
            &NodeLabel::hub_r(HubLevel::K1).in_copy(copy),
        )
    }
}

/// Two stretched copies joined through a shared `L′`. `sa[i] = 1` adds a
/// length-`P` path `ℓ_{(i,c)} → ℓ_{(k+1,c)}` in both copies. The shaved
/// variant splits the hubs of each copy independently.
pub fn radius_approx(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let p = params.checked_p()?;
    let k = params.k;
    let construction = Construction::RadiusApprox;
    input.check(construction.input_len(k, params.shaved), Polarity::EdgeOnOne)?;
    let mut b = GraphBuilder::new(false);
    let lane = Lane::Structural;

    for copy in [CopyTag::Copy1, CopyTag::Copy2] {
        for side in Side::BOTH {
            let owner = Some(side.owner());
            add_side_nodes(&mut b, side, k, w, &[HubLevel::K], copy);
            let hk = side.hub(HubLevel::K).in_copy(copy);
            let targets: Vec<NodeLabel> = if params.shaved {
                (0..w).map(|j| side.split_hub(j).in_copy(copy)).collect()
            } else {
                vec![side.hub(HubLevel::K1).in_copy(copy)]
            };
            for t in &targets {
                b.node(t.clone(), owner);
                b.path(&hk, t, 2 * p, lane, owner)?;
            }
            for i in 0..k {
                let li = side.node(i).in_copy(copy);
                b.path(&li, &hk, p, lane, owner)?;
                for j in 0..w {
                    b.path(&li, &side.bit_node(j, bit_of(i, j)).in_copy(copy), p, lane, owner)?;
                }
                if side == Side::Right {
                    let prime = side.prime(i).in_copy(copy);
                    b.node(prime.clone(), owner);
                    b.path(&prime, &li, p, lane, owner)?;
                }
                if params.shaved {
                    for (j, t) in targets.iter().enumerate() {
                        if input.bit(side, (i * w) as usize + j) {
                            b.path(&li, t, p, Lane::Input, owner)?;
                        }
                    }
                } else if input.bit(side, i as usize) {
                    b.path(&li, &targets[0], p, Lane::Input, owner)?;
                }
            }
        }
        add_crossings(&mut b, w, copy)?;
        add_hub_matching(&mut b, w, params.shaved, copy)?;
    }

    let alice = Some(Owner::Alice);
    for i in 0..k {
        let prime = NodeLabel::l_prime(i);
        b.node(prime.clone(), alice);
        for copy in [CopyTag::Copy1, CopyTag::Copy2] {
            b.path(&prime, &NodeLabel::l(i).in_copy(copy), p, lane, alice)?;
        }
    }

    let meta = meta_for(construction, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{eccentricity, radius};
    use crate::gadgets::parse_bits;

    fn input(sa: &str, sb: &str) -> BitInput {
        BitInput::new(parse_bits(sa).unwrap(), parse_bits(sb).unwrap(), Polarity::EdgeOnOne)
    }

    #[test]
    fn exact_intersecting_center() {
        let inst = radius_exact(&ConstructionParams::new(4), &input("1000", "1000")).unwrap();
        assert_eq!(inst.cut.len(), 5);
        assert_eq!(radius(&inst.graph).unwrap(), 3);
        let l0 = inst.node(&NodeLabel::l(0)).unwrap();
        assert_eq!(eccentricity(&inst.graph, l0).unwrap(), 3);
        let disjoint = radius_exact(&ConstructionParams::new(4), &input("1010", "0101")).unwrap();
        assert!(radius(&disjoint.graph).unwrap() >= 4);
    }

    #[test]
    fn shaved_cut() {
        let zeros = "0".repeat(8);
        let inst = radius_exact(&ConstructionParams::new(4).shaved(true), &input(&zeros, &zeros)).unwrap();
        assert_eq!(inst.cut.len(), 6);
        assert!(radius_exact(&ConstructionParams::new(4).shaved(true), &input("0000", "0000")).is_err());
    }

    #[test]
    fn approx_gap() {
        let params = ConstructionParams::new(4).with_p(2);
        let inst = radius_approx(&params, &input("0010", "0010")).unwrap();
        assert_eq!(inst.cut.len(), 10);
        assert_eq!(radius(&inst.graph).unwrap(), 9);
        let disjoint = radius_approx(&params, &input("0110", "1001")).unwrap();
        assert!(radius(&disjoint.graph).unwrap() >= 13);
    }
}
