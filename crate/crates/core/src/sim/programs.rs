//! Reference distributed algorithms.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{push_uint, read_uint, Message, NodeContext, NodeProgram, PublicParams};
use crate::graph::NodeId;
use crate::scalar::{ceil_log2, Rational};

/// Bits needed for an id or a hop distance in an `n`-node graph.
pub fn id_bits(n: usize) -> usize {
    (ceil_log2(n as u64) as usize).max(1)
}

fn broadcast(degree: usize, msg: Message) -> Vec<Option<Message>> {
    vec![Some(msg); degree]
}

fn encode(values: &[u64], width: usize) -> Message {
    let mut m = Message::with_capacity(values.len() * width);
    for &v in values {
        push_uint(&mut m, v, width);
    }
    m
}

/// Hop distance from `source`. Each node speaks once, the round after it
/// learns its distance, so the run lasts `e(source) + 1` rounds.
#[derive(Clone, Copy, Debug)]
pub struct BfsLayers {
    pub source: NodeId,
}

pub struct BfsState {
    degree: usize,
    width: usize,
    dist: Option<u64>,
    sent: bool,
}

impl NodeProgram for BfsLayers {
    type State = BfsState;
    type Output = u64;

    fn min_bits(&self, params: &PublicParams) -> usize {
        id_bits(params.n)
    }

    fn init(&self, ctx: &NodeContext<'_>) -> BfsState {
        BfsState {
            degree: ctx.degree,
            width: id_bits(ctx.params.n),
            dist: (ctx.id == self.source).then_some(0),
            sent: false,
        }
    }

    fn send(&self, st: &mut BfsState, _round: u64) -> Vec<Option<Message>> {
        match st.dist {
            Some(d) if !st.sent => {
                st.sent = true;
                broadcast(st.degree, encode(&[d], st.width))
            }
            _ => Vec::new(),
        }
    }

    fn receive(&self, st: &mut BfsState, _round: u64, inbox: &[Option<Message>]) -> Option<u64> {
        if st.dist.is_none() {
            st.dist = inbox.iter().flatten().map(|m| read_uint(m, 0, st.width) + 1).min();
        }
        st.dist
    }
}

/// Maximum of the node ids. Every node outputs after `dhat` rounds, where
/// `dhat` is the public parameter of that name (default `n - 1`), which must
/// bound the diameter.
#[derive(Clone, Copy, Debug, Default)]
pub struct FloodMax;

pub struct FloodState {
    degree: usize,
    width: usize,
    best: u64,
    dirty: bool,
    deadline: u64,
}

impl NodeProgram for FloodMax {
    type State = FloodState;
    type Output = u64;

    fn min_bits(&self, params: &PublicParams) -> usize {
        id_bits(params.n)
    }

    fn init(&self, ctx: &NodeContext<'_>) -> FloodState {
        let n = ctx.params.n as i64;
        let dhat = ctx.params.get("dhat").unwrap_or(n - 1).max(1);
        FloodState {
            degree: ctx.degree,
            width: id_bits(ctx.params.n),
            best: ctx.id as u64,
            dirty: true,
            deadline: dhat as u64,
        }
    }

    fn send(&self, st: &mut FloodState, _round: u64) -> Vec<Option<Message>> {
        if !st.dirty {
            return Vec::new();
        }
        st.dirty = false;
        broadcast(st.degree, encode(&[st.best], st.width))
    }

    fn receive(&self, st: &mut FloodState, round: u64, inbox: &[Option<Message>]) -> Option<u64> {
        for m in inbox.iter().flatten() {
            let v = read_uint(m, 0, st.width);
            if v > st.best {
                st.best = v;
                st.dirty = true;
            }
        }
        (round >= st.deadline).then_some(st.best)
    }
}

/// Pipelined source detection: every round a node forwards the smallest
/// `(distance, source)` pair it has not forwarded yet, along the ports in
/// `ports`. With all `n` nodes as sources this settles all distances within
/// `n + D <= 2n` rounds.
struct SourceDetection {
    width: usize,
    known: Vec<u64>,
    pending: BTreeSet<(u64, u64)>,
}

impl SourceDetection {
    fn new(n: usize, id: NodeId) -> Self {
        let mut known = vec![u64::MAX; n];
        known[id] = 0;
        SourceDetection {
            width: id_bits(n),
            known,
            pending: BTreeSet::from([(0, id as u64)]),
        }
    }

    fn send(&mut self, ports: &[bool]) -> Vec<Option<Message>> {
        let Some(pair) = self.pending.pop_first() else {
            return Vec::new();
        };
        if !ports.iter().any(|&p| p) {
            return Vec::new();
        }
        let msg = encode(&[pair.0, pair.1], self.width);
        ports.iter().map(|&p| p.then(|| msg.clone())).collect()
    }

    fn receive(&mut self, inbox: &[Option<Message>]) {
        for m in inbox.iter().flatten() {
            let d = read_uint(m, 0, self.width) + 1;
            let s = read_uint(m, self.width, self.width);
            let cur = &mut self.known[s as usize];
            if d < *cur {
                self.pending.remove(&(*cur, s));
                *cur = d;
                self.pending.insert((d, s));
            }
        }
    }
}

/// What [`ApspDiameter`] reports at every node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ApspOutput {
    pub ecc: u64,
    pub diameter: u64,
    pub radius: u64,
}

/// Exact eccentricity, diameter and radius at every node.
///
/// Rounds `1..=2n` run source detection from every node. Afterwards each node
/// knows its eccentricity `e` and floods the pair (max, min) of eccentricities
/// for `e` more rounds, which covers the whole graph. Round bound: `2n + D + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ApspDiameter;

pub struct ApspState {
    degree: usize,
    phase1: u64,
    sd: SourceDetection,
    all_ports: Vec<bool>,
    ecc: u64,
    hi: u64,
    lo: u64,
    dirty: bool,
}

impl NodeProgram for ApspDiameter {
    type State = ApspState;
    type Output = ApspOutput;

    fn min_bits(&self, params: &PublicParams) -> usize {
        2 * id_bits(params.n)
    }

    fn init(&self, ctx: &NodeContext<'_>) -> ApspState {
        ApspState {
            degree: ctx.degree,
            phase1: 2 * ctx.params.n as u64,
            sd: SourceDetection::new(ctx.params.n, ctx.id),
            all_ports: vec![true; ctx.degree],
            ecc: 0,
            hi: 0,
            lo: 0,
            dirty: false,
        }
    }

    fn send(&self, st: &mut ApspState, round: u64) -> Vec<Option<Message>> {
        if round <= st.phase1 {
            return st.sd.send(&st.all_ports);
        }
        if !st.dirty {
            return Vec::new();
        }
        st.dirty = false;
        broadcast(st.degree, encode(&[st.hi, st.lo], st.sd.width))
    }

    fn receive(&self, st: &mut ApspState, round: u64, inbox: &[Option<Message>]) -> Option<ApspOutput> {
        if round < st.phase1 {
            st.sd.receive(inbox);
            return None;
        }
        if round == st.phase1 {
            st.sd.receive(inbox);
            st.ecc = st.sd.known.iter().copied().max().unwrap_or(0);
            st.hi = st.ecc;
            st.lo = st.ecc;
            st.dirty = true;
        } else {
            let w = st.sd.width;
            for m in inbox.iter().flatten() {
                let (hi, lo) = (read_uint(m, 0, w), read_uint(m, w, w));
                if hi > st.hi || lo < st.lo {
                    st.hi = st.hi.max(hi);
                    st.lo = st.lo.min(lo);
                    st.dirty = true;
                }
            }
        }
        (round - st.phase1 >= st.ecc).then_some(ApspOutput {
            ecc: st.ecc,
            diameter: st.hi,
            radius: st.lo,
        })
    }
}

/// Local check of the spanner inequality against every source.
///
/// H is the set of marked ports. Rounds `1..=2n` detect hop distances in G,
/// rounds `2n+1..=4n` detect them in H. At round `4n` a node outputs whether
/// `d_H(v, s) <= alpha d_G(v, s) + beta` holds for every source `s`. G must
/// be unweighted.
#[derive(Clone, Copy, Debug)]
pub struct SpannerCheck {
    pub alpha: Rational,
    pub beta: Rational,
}

pub struct SpannerState {
    n: usize,
    id: NodeId,
    all_ports: Vec<bool>,
    h_ports: Vec<bool>,
    g: SourceDetection,
    h: SourceDetection,
}

impl NodeProgram for SpannerCheck {
    type State = SpannerState;
    type Output = bool;

    fn min_bits(&self, params: &PublicParams) -> usize {
        2 * id_bits(params.n)
    }

    fn init(&self, ctx: &NodeContext<'_>) -> SpannerState {
        let n = ctx.params.n;
        SpannerState {
            n,
            id: ctx.id,
            all_ports: vec![true; ctx.degree],
            h_ports: ctx.marked_ports.clone(),
            g: SourceDetection::new(n, ctx.id),
            h: SourceDetection::new(n, ctx.id),
        }
    }

    fn send(&self, st: &mut SpannerState, round: u64) -> Vec<Option<Message>> {
        let n = st.n as u64;
        if round <= 2 * n {
            st.g.send(&st.all_ports)
        } else if round <= 4 * n {
            st.h.send(&st.h_ports)
        } else {
            Vec::new()
        }
    }

    fn receive(&self, st: &mut SpannerState, round: u64, inbox: &[Option<Message>]) -> Option<bool> {
        let n = st.n as u64;
        if round <= 2 * n {
            st.g.receive(inbox);
            return None;
        }
        if round <= 4 * n {
            st.h.receive(inbox);
        }
        if round < 4 * n {
            return None;
        }
        let ok = (0..st.n).filter(|&s| s != st.id).all(|s| {
            let dh = st.h.known[s];
            dh != u64::MAX
                && Rational::from_integer(dh as i64)
                    <= self.alpha * Rational::from_integer(st.g.known[s] as i64) + self.beta
        });
        Some(ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{bfs_distances, diameter};
    use crate::graph::Graph;
    use crate::label::NodeLabel;
    use crate::sim::{run, SimConfig, SimError};

    fn path(n: u32) -> Graph {
        let labels: Vec<_> = (0..n).map(NodeLabel::l).collect();
        let edges: Vec<_> = (1..n).map(|i| (NodeLabel::l(i - 1), NodeLabel::l(i), 1)).collect();
        Graph::from_labeled_edges(labels, &edges, false).unwrap()
    }

    fn cycle(n: u32) -> Graph {
        let labels: Vec<_> = (0..n).map(NodeLabel::l).collect();
        let edges: Vec<_> = (0..n).map(|i| (NodeLabel::l(i), NodeLabel::l((i + 1) % n), 1)).collect();
        Graph::from_labeled_edges(labels, &edges, false).unwrap()
    }

    fn cfg(b: usize) -> SimConfig {
        SimConfig {
            b,
            max_rounds: 1000,
            seed: 0,
        }
    }

    #[test]
    fn flood_max_on_path() {
        let g = path(5);
        let out = run(&g, &FloodMax, &PublicParams::new(5), None, cfg(32)).unwrap();
        assert!(out.terminated);
        assert!(out.outputs.iter().all(|o| *o == Some(4)));
        assert!(out.output_rounds.iter().all(|r| r.unwrap() <= 4));
    }

    #[test]
    fn bfs_matches_oracle() {
        let g = cycle(7);
        let out = run(&g, &BfsLayers { source: 2 }, &PublicParams::new(7), None, cfg(8)).unwrap();
        let oracle = bfs_distances(&g, 2).unwrap();
        for v in 0..7 {
            assert_eq!(out.outputs[v].map(|d| d as u32), oracle.get(v));
        }
        assert_eq!(out.rounds_used, 4);
    }

    #[test]
    fn bfs_on_star_takes_one_round() {
        let c = NodeLabel::x(1);
        let mut labels = vec![c.clone()];
        let mut edges = Vec::new();
        for i in 0..6 {
            labels.push(NodeLabel::l(i));
            edges.push((c.clone(), NodeLabel::l(i), 1));
        }
        let g: Graph = Graph::from_labeled_edges(labels, &edges, false).unwrap();
        let s = g.id_of(&c).unwrap();
        let out = run(&g, &BfsLayers { source: s }, &PublicParams::new(7), None, cfg(8)).unwrap();
        assert!(out.output_rounds.iter().all(|r| r.unwrap() <= 1));
    }

    #[test]
    fn apsp_on_cycle_and_path() {
        let g = cycle(6);
        let out = run(&g, &ApspDiameter, &PublicParams::new(6), None, cfg(8)).unwrap();
        assert!(out.terminated);
        for o in &out.outputs {
            let o = o.unwrap();
            assert_eq!((o.ecc, o.diameter, o.radius), (3, 3, 3));
        }
        let g = path(9);
        let out = run(&g, &ApspDiameter, &PublicParams::new(9), None, cfg(10)).unwrap();
        assert!(out.outputs.iter().all(|o| o.unwrap().diameter == diameter(&g).unwrap() as u64));
        assert!(out.outputs.iter().all(|o| o.unwrap().radius == 4));
    }

    #[test]
    fn apsp_rejects_tiny_budget() {
        let g = cycle(6);
        let err = run(&g, &ApspDiameter, &PublicParams::new(6), None, cfg(5)).unwrap_err();
        assert_eq!(err, SimError::BudgetTooSmall { b: 5, needed: 6 });
    }

    #[test]
    fn spanner_check_on_cycle() {
        let g = cycle(5);
        let mask: Vec<bool> = g.edges().iter().map(|&(u, v)| (u, v) != (0, 4)).collect();
        let check = |a, b| {
            let prog = SpannerCheck {
                alpha: Rational::from_integer(a),
                beta: Rational::from_integer(b),
            };
            let out = run(&g, &prog, &PublicParams::new(5), Some(&mask), cfg(6)).unwrap();
            out.outputs.iter().all(|o| o.unwrap())
        };
        assert!(check(4, 0));
        assert!(!check(1, 0));
    }
}
