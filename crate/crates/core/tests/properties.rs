mod oracle;

use lbkit::gadgets::{build, degree_reduce, parse_bits, render_bits, BitInput, Bits, Construction, ConstructionParams};
use lbkit::label::{CopyTag, HubLevel, Lane, Role};
use lbkit::reduction::public_params;
use lbkit::sim::{run, ApspDiameter, SimConfig};
use lbkit::spanner::verify_spanner;
use lbkit::{io, Graph, NodeLabel, Rational};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn leaf_label() -> impl Strategy<Value = NodeLabel> {
    let small = 0u32..40;
    prop_oneof![
        small.clone().prop_map(NodeLabel::l),
        small.clone().prop_map(NodeLabel::r),
        small.clone().prop_map(NodeLabel::l_prime),
        small.clone().prop_map(NodeLabel::r_prime),
        small.clone().prop_map(NodeLabel::f),
        small.clone().prop_map(NodeLabel::t),
        small.clone().prop_map(NodeLabel::f_prime),
        small.clone().prop_map(NodeLabel::t_prime),
        prop::sample::select(vec![HubLevel::K, HubLevel::K1, HubLevel::K2]).prop_map(NodeLabel::hub_l),
        prop::sample::select(vec![HubLevel::K, HubLevel::K1, HubLevel::K2]).prop_map(NodeLabel::hub_r),
        small.clone().prop_map(|j| NodeLabel::new(Role::HubLSplit(j))),
        small.clone().prop_map(|j| NodeLabel::new(Role::HubRSplit(j))),
        Just(NodeLabel::new(Role::A)),
        Just(NodeLabel::new(Role::B)),
        (1u8..4).prop_map(NodeLabel::x),
        small.prop_map(|i| NodeLabel::new(Role::CliquePad(i))),
    ]
}

/// Trees may nest; path endpoints are never themselves path nodes.
fn label() -> impl Strategy<Value = NodeLabel> {
    let endpoint = leaf_label().prop_recursive(2, 6, 1, |inner| {
        (inner, 0u32..4, 1u32..64).prop_map(|(root, t, pos)| NodeLabel::tree_node(&root, t, pos))
    });
    let path = (endpoint.clone(), endpoint.clone(), any::<bool>(), 1u32..9).prop_map(|(a, b, input, step)| {
        let lane = if input { Lane::Input } else { Lane::Structural };
        NodeLabel::path_node(&a, &b, lane, step, 10)
    });
    (prop_oneof![endpoint, path], 0u8..3).prop_map(|(l, c)| l.in_copy(CopyTag::from_index(c)))
}

fn bits(len: usize) -> impl Strategy<Value = Bits> {
    prop::collection::vec(any::<bool>(), len).prop_map(|v| v.into_iter().collect())
}

/// A connected graph on `n` nodes: a random tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        (Just(n), parents, prop::collection::vec((0..n, 0..n), 0..2 * n))
    })
    .prop_map(|(n, parents, extra)| {
        let mut edges: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
        edges.extend(extra.into_iter().filter(|(a, b)| a != b));
        edges.iter_mut().for_each(|e| *e = (e.0.min(e.1), e.0.max(e.1)));
        edges.sort_unstable();
        edges.dedup();
        let labels = (0..n as u32).map(NodeLabel::l).collect();
        Graph::from_id_edges(labels, edges.into_iter().map(|(a, b)| (a, b, 1)).collect(), false).unwrap()
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn label_text_roundtrip(l in label()) {
        let text = l.to_string();
        prop_assert_eq!(text.parse::<NodeLabel>().unwrap(), l);
    }

    #[test]
    fn bit_strings_roundtrip(b in bits(37)) {
        prop_assert_eq!(parse_bits(&render_bits(&b)).unwrap(), b);
    }

    #[test]
    fn hex_digits_expand_to_nibbles(v in any::<u32>()) {
        let parsed = parse_bits(&format!("0x{v:08x}")).unwrap();
        prop_assert_eq!(parsed.len(), 32);
        let back = parsed.iter().fold(0u32, |acc, b| (acc << 1) | *b as u32);
        prop_assert_eq!(back, v);
    }

    #[test]
    fn builds_are_deterministic(
        c in prop::sample::select(Construction::ALL[..6].to_vec()),
        w in 2u32..4,
        p in 1u32..4,
        seed_a in bits(64),
        seed_b in bits(64),
    ) {
        let k = 1 << w;
        let params = ConstructionParams::new(k).with_p(p);
        let len = c.input_len(k, false);
        let input = || BitInput::new(seed_a[..len].to_bitvec(), seed_b[..len].to_bitvec(), c.polarity());
        if c == Construction::RadiusConstDegree && k < 16 {
            return Ok(());
        }
        let one = build(c, &params, &input()).unwrap();
        let two = build(c, &params, &input()).unwrap();
        prop_assert_eq!(&one.graph, &two.graph);
        prop_assert_eq!(io::to_json(&one), io::to_json(&two));
    }

    #[test]
    fn degree_reduction_invariants(g in connected_graph(12), pick in any::<prop::sample::Index>()) {
        let v = pick.index(g.n());
        let incident: Vec<usize> = g.neighbors(v).iter().map(|&(_, e)| e).collect();
        prop_assume!(incident.len() >= 3);
        let y = incident.len();
        let height = lbkit::scalar::ceil_log2(y as u64) as u64;
        let r = degree_reduce(&g, v, &incident).unwrap();
        let added = r.n() - g.n();
        prop_assert_eq!(r.edge_count(), g.edge_count() + added);
        let rv = r.id_of(g.label(v)).unwrap();
        prop_assert_eq!(r.degree(rv), 2);
        let new_nodes: Vec<usize> = (0..r.n()).filter(|&u| g.id_of(r.label(u)).is_none()).collect();
        prop_assert_eq!(new_nodes.len(), added);
        for &u in &new_nodes {
            prop_assert!(r.degree(u) <= 3);
        }
        // old distances never shrink; v reaches each former neighbor in `height` hops
        let (ga, ra) = (oracle::adjacency(&g, None), oracle::adjacency(&r, None));
        for s in 0..g.n() {
            let d = oracle::sssp(&ga, s);
            let d2 = oracle::sssp(&ra, r.id_of(g.label(s)).unwrap());
            for t in 0..g.n() {
                prop_assert!(d2[r.id_of(g.label(t)).unwrap()] >= d[t]);
            }
        }
        let from_v = oracle::sssp(&ra, rv);
        for &(u, _) in g.neighbors(v) {
            prop_assert_eq!(from_v[r.id_of(g.label(u)).unwrap()], Some(height));
        }
    }

    #[test]
    fn spanner_verdict_is_monotone(
        g in connected_graph(10),
        keep in prop::collection::vec(prop::bool::weighted(0.8), 40),
        a in 1i64..4,
        b in 0i64..4,
        da in 0i64..3,
        db in 0i64..3,
    ) {
        let h: Vec<usize> = (0..g.edge_count()).filter(|&e| keep[e % keep.len()]).collect();
        let r = |x| Rational::from_integer(x);
        let loose = verify_spanner(&g, &h, r(a + da), r(b + db)).unwrap().ok;
        let tight = verify_spanner(&g, &h, r(a), r(b)).unwrap().ok;
        prop_assert!(!tight || loose);
        let mask: Vec<bool> = (0..g.edge_count()).map(|e| h.contains(&e)).collect();
        let (ga, ha) = (oracle::adjacency(&g, None), oracle::adjacency(&g, Some(&mask)));
        prop_assert_eq!(tight, oracle::spanner_ok_on(&ga, &ha, g.n(), r(a), r(b)));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn simulation_is_deterministic_and_within_budget(
        sa in bits(4),
        sb in bits(4),
        seed in any::<u64>(),
        c in prop::sample::select(vec![Construction::DiameterExact, Construction::RadiusExact, Construction::Eccentricity]),
    ) {
        let inst = build(c, &ConstructionParams::new(4), &BitInput::new(sa, sb, c.polarity())).unwrap();
        let mut cfg = SimConfig::for_graph(&inst.graph);
        cfg.seed = seed;
        let params = public_params(&inst);
        let one = run(&inst.graph, &ApspDiameter, &params, None, cfg).unwrap();
        let two = run(&inst.graph, &ApspDiameter, &params, None, cfg).unwrap();
        prop_assert_eq!(&one, &two);
        prop_assert!(one.terminated);
        for e in &one.ledger.entries {
            prop_assert!(e.forward as usize <= cfg.b && e.backward as usize <= cfg.b);
        }
    }
}
