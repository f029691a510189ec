use crate::graph::GraphBuilder;
use crate::label::{CopyTag, HubLevel, Lane, NodeLabel, Role};

use super::{
    add_crossings, add_side_nodes, bit_of, meta_for, BitInput, Construction, ConstructionParams, GadgetError,
    Instance, Polarity, Side,
};

/// Unstretched diameter instance. `sa[i] = 0` adds `(ℓ_i, ℓ_{k+1})`.
pub fn diameter_exact(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let k = params.k;
    input.check(k as usize, Polarity::EdgeOnZero)?;
    let mut b = GraphBuilder::new(false);
    let none = CopyTag::None;

    for side in Side::BOTH {
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K, HubLevel::K1], none);
        let apex = match side {
            Side::Left => NodeLabel::new(Role::A),
            Side::Right => NodeLabel::new(Role::B),
        };
        b.node(apex.clone(), Some(side.owner()));
        let hk = side.hub(HubLevel::K);
        let hk1 = side.hub(HubLevel::K1);
        b.edge(&hk, &hk1)?;
        b.edge(&apex, &hk)?;
        b.edge(&apex, &hk1)?;
        for j in 0..w {
            for value in [false, true] {
                b.edge(&apex, &side.bit_node(j, value))?;
            }
        }
        for i in 0..k {
            let li = side.node(i);
            b.edge(&li, &hk)?;
            for j in 0..w {
                b.edge(&li, &side.bit_node(j, bit_of(i, j)))?;
            }
            if !input.bit(side, i as usize) {
                b.input_edge(&li, &hk1)?;
            }
        }
    }
    add_crossings(&mut b, w, none)?;
    b.edge(&NodeLabel::hub_l(HubLevel::K1), &NodeLabel::hub_r(HubLevel::K1))?;
    b.edge(&NodeLabel::new(Role::A), &NodeLabel::new(Role::B))?;

    let meta = meta_for(Construction::DiameterExact, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}

/// Stretched diameter instance with `L′`/`R′` and length-`P` paths.
/// `sa[i] = 0` adds a single edge `(ℓ_i, ℓ_{k+1})`.
pub fn diameter_approx(params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    let w = params.w()?;
    let p = params.checked_p()?;
    let k = params.k;
    input.check(k as usize, Polarity::EdgeOnZero)?;
    let mut b = GraphBuilder::new(false);
    let none = CopyTag::None;
    let lane = Lane::Structural;

    for side in Side::BOTH {
        let owner = Some(side.owner());
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K, HubLevel::K1], none);
        let hk = side.hub(HubLevel::K);
        let hk1 = side.hub(HubLevel::K1);
        b.path(&hk, &hk1, p, lane, owner)?;
        for j in 0..w {
            for value in [false, true] {
                b.path(&side.bit_node(j, value), &hk1, p, lane, owner)?;
            }
        }
        for i in 0..k {
            let li = side.node(i);
            let prime = side.prime(i);
            b.node(prime.clone(), owner);
            b.path(&prime, &li, p, lane, owner)?;
            b.path(&li, &hk, p, lane, owner)?;
            for j in 0..w {
                b.path(&li, &side.bit_node(j, bit_of(i, j)), p, lane, owner)?;
            }
            if !input.bit(side, i as usize) {
                b.input_edge(&li, &hk1)?;
            }
        }
    }
    add_crossings(&mut b, w, none)?;
    b.edge(&NodeLabel::hub_l(HubLevel::K1), &NodeLabel::hub_r(HubLevel::K1))?;

    let meta = meta_for(Construction::DiameterApprox, params, input);
    Instance::from_built(b.finish()?, meta, input.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{bfs_distances, diameter};
    use crate::gadgets::parse_bits;

    fn input(sa: &str, sb: &str) -> BitInput {
        BitInput::new(parse_bits(sa).unwrap(), parse_bits(sb).unwrap(), Polarity::EdgeOnZero)
    }

    #[test]
    fn exact_small_facts() {
        let inst = diameter_exact(&ConstructionParams::new(4), &input("1000", "1000")).unwrap();
        assert_eq!(inst.cut.len(), 6);
        let l0 = inst.node(&NodeLabel::l(0)).unwrap();
        let d = bfs_distances(&inst.graph, l0).unwrap();
        assert_eq!(d.get(inst.node(&NodeLabel::r(0)).unwrap()), Some(5));
        assert_eq!(d.get(inst.node(&NodeLabel::r(3)).unwrap()), Some(3));
        let disjoint = diameter_exact(&ConstructionParams::new(4), &input("0000", "0000")).unwrap();
        assert!(diameter(&disjoint.graph).unwrap() <= 4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            diameter_exact(&ConstructionParams::new(6), &input("000000", "000000")),
            Err(GadgetError::BadK(6))
        ));
        assert!(matches!(
            diameter_exact(&ConstructionParams::new(4), &input("000", "0000")),
            Err(GadgetError::LengthMismatch { .. })
        ));
        let wrong = BitInput::new(parse_bits("0000").unwrap(), parse_bits("0000").unwrap(), Polarity::EdgeOnOne);
        assert!(matches!(
            diameter_exact(&ConstructionParams::new(4), &wrong),
            Err(GadgetError::Polarity { .. })
        ));
    }

    #[test]
    fn approx_prime_distances() {
        let params = ConstructionParams::new(4).with_p(3);
        let inst = diameter_approx(&params, &input("0100", "0100")).unwrap();
        assert_eq!(inst.cut.len(), 5);
        let src = inst.node(&NodeLabel::l_prime(1)).unwrap();
        let d = bfs_distances(&inst.graph, src).unwrap();
        assert_eq!(d.get(inst.node(&NodeLabel::r_prime(1)).unwrap()), Some(19));
        assert_eq!(d.get(inst.node(&NodeLabel::r_prime(2)).unwrap()), Some(13));
    }
}
