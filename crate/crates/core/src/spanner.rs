//! Spanner-verification instances and an exact `(α, β)`-spanner check.

use rayon::prelude::*;
use serde::Serialize;

use crate::distance::{distances, DistanceReport};
use crate::gadgets::{
    bit_of, add_crossings, add_side_nodes, render_bits, BitInput, Construction, GadgetError, Instance, InstanceMeta,
    Polarity, Side,
};
use crate::graph::{EdgeId, Graph, GraphBuilder, GraphError, NodeId, Owner};
use crate::label::{CopyTag, HubLevel, Lane, NodeLabel, Role};
use crate::scalar::{render_rational, Rational, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpannerParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub x: u32,
    pub weighted: bool,
    pub clique_pad: Option<u32>,
}

impl SpannerParams {
    pub fn new(alpha: Rational, beta: Rational, x: u32) -> Self {
        SpannerParams {
            alpha,
            beta,
            x,
            weighted: false,
            clique_pad: None,
        }
    }

    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn clique_pad(mut self, size: Option<u32>) -> Self {
        self.clique_pad = size;
        self
    }

    /// `P = αx + β`, validated to be a positive even integer.
    pub fn p(&self) -> Result<u32, GadgetError> {
        let bad = |msg: &str| GadgetError::Spanner(msg.to_string());
        if self.alpha < Rational::from_integer(1) {
            return Err(bad("alpha must be at least 1"));
        }
        if self.beta < Rational::from_integer(0) {
            return Err(bad("beta must be non-negative"));
        }
        if self.x == 0 {
            return Err(bad("x must be positive"));
        }
        let p = self.alpha * Rational::from_integer(self.x as i64) + self.beta;
        if !p.is_integer() {
            return Err(bad(&format!("P = alpha*x + beta = {} is not an integer", render_rational(&p))));
        }
        let p = p.to_integer();
        if p <= 0 || p % 2 != 0 {
            return Err(bad(&format!("P = alpha*x + beta = {p} must be even")));
        }
        // a longer unweighted input path would leave its interior isolated in H
        if !self.weighted && self.x != 1 {
            return Err(bad("unweighted mode needs x = 1"));
        }
        u32::try_from(p).map_err(|_| bad("P too large"))
    }

    /// Conditions under which the instance builds but the hardness direction
    /// says nothing.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alpha >= self.beta + 1 {
            out.push(format!(
                "alpha = {} >= beta + 1 = {}: an intersecting input need not break the spanner",
                render_rational(&self.alpha),
                render_rational(&(self.beta + 1))
            ));
        }
        out
    }
}

/// Builds `G` and `H = E(G) \ Dist`, where `Dist` is the set of edges on the
/// input paths. `sa[i] = 1` adds a length-`x` path `ℓ_i → ℓ_{k+1}`.
///
/// In weighted mode the length-`P/2` links and the input links are single
/// edges of that weight. The length-`P` link `ℓ_i → ℓ_{k+1}` becomes two
/// edges of weight `P/2` through a midpoint, so that it is not parallel to
/// the weight-`x` input edge between the same endpoints.
pub fn build_spanner_instance(params: &SpannerParams, k: u32, input: &BitInput) -> Result<Instance, GadgetError> {
    let p = params.p()?;
    let w = crate::gadgets::log2k(k).ok_or(GadgetError::BadK(k))?;
    if input.polarity != Polarity::EdgeOnOne {
        return Err(GadgetError::Polarity {
            expected: Polarity::EdgeOnOne,
            got: input.polarity,
        });
    }
    if input.sa.len() != k as usize || input.sb.len() != k as usize {
        return Err(GadgetError::LengthMismatch {
            expected: k as usize,
            sa: input.sa.len(),
            sb: input.sb.len(),
        });
    }
    let half = p / 2;
    let mut b: GraphBuilder<u32> = GraphBuilder::new(params.weighted);
    let lane = Lane::Structural;

    for side in Side::BOTH {
        let owner = Some(side.owner());
        add_side_nodes(&mut b, side, k, w, &[HubLevel::K1, HubLevel::K2], CopyTag::None);
        let hk1 = side.hub(HubLevel::K1);
        let hk2 = side.hub(HubLevel::K2);
        for i in 0..k {
            let li = side.node(i);
            for j in 0..w {
                b.link(&li, &side.bit_node(j, bit_of(i, j)), half, lane, owner)?;
            }
            if params.weighted {
                let mid = NodeLabel::path_node(&li, &hk1, lane, half, p);
                b.node(mid.clone(), owner);
                b.weighted_edge(&li, &mid, half)?;
                b.weighted_edge(&mid, &hk1, half)?;
            } else {
                b.link(&li, &hk1, p, lane, owner)?;
            }
            b.link(&hk2, &li, half, lane, owner)?;
            let bit = match side {
                Side::Left => input.sa[i as usize],
                Side::Right => input.sb[i as usize],
            };
            if bit {
                b.link(&li, &hk1, params.x, Lane::Input, owner)?;
            }
        }
    }
    add_crossings(&mut b, w, CopyTag::None)?;
    b.edge(&NodeLabel::hub_l(HubLevel::K1), &NodeLabel::hub_r(HubLevel::K1))?;

    let pads: Vec<NodeLabel> = (0..params.clique_pad.unwrap_or(0))
        .map(|i| NodeLabel::new(Role::CliquePad(i)))
        .collect();
    for pad in &pads {
        b.node(pad.clone(), Some(Owner::Alice));
    }
    if let Some(first) = pads.first() {
        b.edge(first, &NodeLabel::hub_l(HubLevel::K1))?;
        for (a, u) in pads.iter().enumerate() {
            for v in &pads[a + 1..] {
                b.edge(u, v)?;
            }
        }
    }

    let meta = InstanceMeta {
        construction: Construction::Spanner,
        k,
        p: Some(p),
        shaved: false,
        alpha: Some(render_rational(&params.alpha)),
        beta: Some(render_rational(&params.beta)),
        x: Some(params.x),
        weighted: params.weighted,
        clique_pad: params.clique_pad,
        sa: render_bits(&input.sa),
        sb: render_bits(&input.sb),
    };
    let mut inst = Instance::from_built(b.finish()?, meta, input.clone())?;

    // A star from pad0 spans the clique with additive stretch 1 whenever
    // α + β >= 2; otherwise H keeps the whole clique.
    let star_only = params.alpha + params.beta >= Rational::from_integer(2);
    let pad0 = pads.first().and_then(|l| inst.graph.id_of(l));
    let h: Vec<EdgeId> = (0..inst.graph.edge_count())
        .filter(|e| inst.input_edges.binary_search(e).is_err())
        .filter(|&e| {
            let (u, v) = inst.graph.edge(e);
            let both_pads = is_pad(inst.graph.label(u)) && is_pad(inst.graph.label(v));
            !(both_pads && star_only && Some(u) != pad0 && Some(v) != pad0)
        })
        .collect();
    inst.h_edges = Some(h);
    Ok(inst)
}

fn is_pad(label: &NodeLabel) -> bool {
    matches!(label.role, Role::CliquePad(_))
}

/// Reads `α`, `β` back from instance metadata.
pub fn params_of(inst: &Instance) -> Option<SpannerParams> {
    let meta = &inst.meta;
    Some(SpannerParams {
        alpha: crate::scalar::parse_rational(meta.alpha.as_deref()?)?,
        beta: crate::scalar::parse_rational(meta.beta.as_deref()?)?,
        x: meta.x?,
        weighted: meta.weighted,
        clique_pad: meta.clique_pad,
    })
}

/// A violating pair: `d_H(u, v) > α d_G(u, v) + β`; `d_h = None` when `H`
/// disconnects the pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub u: NodeId,
    pub v: NodeId,
    pub d_g: u64,
    pub d_h: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpannerVerdict {
    pub ok: bool,
    pub witness: Option<Witness>,
}

/// Exact check that the edge subset `h` is an `(α, β)`-spanner of `g`. The
/// witness is the lexicographically least violating pair `(u, v)`, `u < v`.
pub fn verify_spanner<W: Weight>(
    g: &Graph<W>,
    h: &[EdgeId],
    alpha: Rational,
    beta: Rational,
) -> Result<SpannerVerdict, GadgetError> {
    let mut keep = vec![false; g.edge_count()];
    for &e in h {
        if e >= g.edge_count() {
            return Err(GadgetError::Graph(GraphError::MissingEdge(e, e)));
        }
        keep[e] = true;
    }
    let sub = g.edge_subgraph(&keep);
    let witnesses: Vec<Option<Witness>> = (0..g.n())
        .into_par_iter()
        .map(|u| -> Result<Option<Witness>, GadgetError> {
            let dg = distances(g, u)?;
            dg.max_distance(g)?;
            let dh = distances(&sub, u)?;
            Ok(first_violation(u, &dg, &dh, alpha, beta))
        })
        .collect::<Result<_, _>>()?;
    let witness = witnesses.into_iter().flatten().next();
    Ok(SpannerVerdict {
        ok: witness.is_none(),
        witness,
    })
}

fn first_violation<W: Weight>(
    u: NodeId,
    dg: &DistanceReport<W>,
    dh: &DistanceReport<W>,
    alpha: Rational,
    beta: Rational,
) -> Option<Witness> {
    (u + 1..dg.dist.len()).find_map(|v| {
        let d_g = dg.dist[v].expect("g is connected").as_u64();
        let d_h = dh.dist[v].map(Weight::as_u64);
        let bound = alpha * Rational::from_integer(d_g as i64) + beta;
        let violated = match d_h {
            None => true,
            Some(d) => Rational::from_integer(d as i64) > bound,
        };
        violated.then_some(Witness { u, v, d_g, d_h })
    })
}

/// Verifies the instance's own `H` against its own `(α, β)`.
pub fn verify_instance(inst: &Instance) -> Result<SpannerVerdict, GadgetError> {
    let params = params_of(inst).ok_or_else(|| GadgetError::Spanner("not a spanner instance".into()))?;
    let h = inst
        .h_edges
        .as_ref()
        .ok_or_else(|| GadgetError::Spanner("instance has no H".into()))?;
    verify_spanner(&inst.graph, h, params.alpha, params.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dijkstra_distances;
    use crate::gadgets::parse_bits;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn input(sa: &str, sb: &str) -> BitInput {
        BitInput::new(parse_bits(sa).unwrap(), parse_bits(sb).unwrap(), Polarity::EdgeOnOne)
    }

    fn cycle(n: u32) -> Graph {
        let labels = (0..n).map(NodeLabel::l).collect();
        let edges: Vec<_> = (0..n)
            .map(|i| (NodeLabel::l(i), NodeLabel::l((i + 1) % n), 1))
            .collect();
        Graph::from_labeled_edges(labels, &edges, false).unwrap()
    }

    #[test]
    fn identical_subgraph_is_a_spanner() {
        let g = cycle(6);
        let all: Vec<EdgeId> = (0..g.edge_count()).collect();
        assert!(verify_spanner(&g, &all, r(1), r(0)).unwrap().ok);
    }

    #[test]
    fn five_cycle_minus_an_edge() {
        let g = cycle(5);
        let removed = g.find_edge(0, 4).unwrap();
        let h: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| e != removed).collect();
        assert!(verify_spanner(&g, &h, r(4), r(0)).unwrap().ok);
        let verdict = verify_spanner(&g, &h, r(1), r(0)).unwrap();
        assert!(!verdict.ok);
        let w = verdict.witness.unwrap();
        assert_eq!((w.u, w.v, w.d_g, w.d_h), (0, 3, 2, Some(3)));
    }

    #[test]
    fn disconnected_h_is_a_violation() {
        let g = cycle(4);
        let verdict = verify_spanner(&g, &[0], r(10), r(10)).unwrap();
        assert_eq!(verdict.witness.unwrap().d_h, None);
        assert!(verify_spanner(&g, &[99], r(1), r(0)).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(SpannerParams::new(r(2), r(5), 3).weighted(true).p().is_err());
        assert_eq!(SpannerParams::new(r(2), r(4), 3).weighted(true).p().unwrap(), 10);
        assert!(SpannerParams::new(r(2), r(4), 3).p().is_err());
        assert_eq!(SpannerParams::new(r(1), r(3), 1).weighted(true).p().unwrap(), 4);
        assert!(SpannerParams::new(Rational::new(1, 2), r(3), 2).weighted(true).p().is_err());
        assert!(!SpannerParams::new(r(3), r(1), 2).warnings().is_empty());
    }

    #[test]
    fn observation_distances() {
        let params = SpannerParams::new(r(1), r(3), 1);
        let inst = build_spanner_instance(&params, 4, &input("0100", "0100")).unwrap();
        assert_eq!(inst.cut.len(), 5);
        let l1 = inst.node(&NodeLabel::l(1)).unwrap();
        let r1 = inst.node(&NodeLabel::r(1)).unwrap();
        let h = inst.graph.edge_subgraph(&inst.h_mask());
        assert_eq!(dijkstra_distances(&inst.graph, l1).unwrap().get(r1), Some(3));
        assert_eq!(dijkstra_distances(&h, l1).unwrap().get(r1), Some(9));
        let verdict = verify_instance(&inst).unwrap();
        assert!(!verdict.ok);
    }

    #[test]
    fn clique_padding_keeps_verdict() {
        let params = SpannerParams::new(r(1), r(3), 1);
        for (sa, sb) in [("0110", "1001"), ("0110", "0100")] {
            let plain = build_spanner_instance(&params, 4, &input(sa, sb)).unwrap();
            let padded = build_spanner_instance(&params.clique_pad(Some(4)), 4, &input(sa, sb)).unwrap();
            assert_eq!(padded.graph.edge_count(), plain.graph.edge_count() + 1 + 6);
            assert_eq!(
                padded.h_edges.as_ref().unwrap().len(),
                plain.h_edges.as_ref().unwrap().len() + 1 + 3
            );
            assert_eq!(verify_instance(&plain).unwrap().ok, verify_instance(&padded).unwrap().ok);
        }
    }
}
