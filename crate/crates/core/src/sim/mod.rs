//! Synchronous CONGEST(b) simulator with exact per-edge bit accounting.
//!
//! A round has three phases: every node emits at most one message per port,
//! messages are delivered, and every node consumes its inbox. A program
//! addresses neighbors only through port numbers; port `p` of node `u` is
//! its `p`-th neighbor in id order.

pub mod programs;

use std::collections::BTreeMap;
use std::fmt::Debug;

use bitvec::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, NodeId};
use crate::scalar::{ceil_log2, Weight};

pub use programs::{ApspDiameter, ApspOutput, BfsLayers, FloodMax, SpannerCheck};

/// A message is a raw bit string; its cost is its exact length.
pub type Message = BitVec<u64, Lsb0>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("protocol violation: node {node} sent {bits} bits in round {round} (limit {limit})")]
    ProtocolViolation {
        node: NodeId,
        round: u64,
        bits: usize,
        limit: usize,
    },
    #[error("node {node} returned {len} outbox slots in round {round} but has degree {degree}")]
    BadOutbox {
        node: NodeId,
        round: u64,
        len: usize,
        degree: usize,
    },
    #[error("node {node} changed its output in round {round}")]
    OutputChanged { node: NodeId, round: u64 },
    #[error("message size b = {b} is below the {needed} bits the program needs")]
    BudgetTooSmall { b: usize, needed: usize },
    #[error("b must be at least 1")]
    ZeroBudget,
    #[error("graph is disconnected")]
    Disconnected,
}

/// Parameters every node may read.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PublicParams {
    pub n: usize,
    pub values: BTreeMap<String, i64>,
}

impl PublicParams {
    pub fn new(n: usize) -> Self {
        PublicParams {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<i64> {
        self.values.get(key).copied()
    }
}

/// Everything a node knows at start-up.
#[derive(Clone, Debug)]
pub struct NodeContext<'a> {
    pub id: NodeId,
    pub degree: usize,
    pub params: &'a PublicParams,
    /// Per-port flag for a locally known edge subset (e.g. membership in H).
    pub marked_ports: Vec<bool>,
    seed: u64,
}

impl NodeContext<'_> {
    /// Per-node random source derived from the run seed.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (self.id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// A distributed algorithm, run identically at every node.
pub trait NodeProgram {
    type State;
    type Output: Clone + PartialEq + Debug;

    /// Smallest message budget the program can run with.
    fn min_bits(&self, _params: &PublicParams) -> usize {
        1
    }

    fn init(&self, ctx: &NodeContext<'_>) -> Self::State;

    /// Outgoing messages, one slot per port; an empty vector means silence.
    fn send(&self, state: &mut Self::State, round: u64) -> Vec<Option<Message>>;

    /// Consumes the inbox (one slot per port) and returns the output, if any.
    fn receive(&self, state: &mut Self::State, round: u64, inbox: &[Option<Message>]) -> Option<Self::Output>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub b: usize,
    pub max_rounds: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn for_graph<W: Weight>(g: &Graph<W>) -> Self {
        SimConfig {
            b: default_b(g.n()),
            max_rounds: 10 * g.n() as u64 + 100,
            seed: 0,
        }
    }
}

/// `2 ceil(log2 n) + 2`: room for one (id, distance) pair.
pub fn default_b(n: usize) -> usize {
    2 * ceil_log2(n as u64) as usize + 2
}

/// Bits in one round on one edge. `forward` is from the smaller endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub round: u32,
    pub edge: u32,
    pub forward: u16,
    pub backward: u16,
}

impl LedgerEntry {
    pub fn bits(&self) -> u64 {
        self.forward as u64 + self.backward as u64
    }
}

/// Every nonzero per-round, per-edge bit count of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrafficLedger {
    pub entries: Vec<LedgerEntry>,
}

impl TrafficLedger {
    pub fn total_bits(&self) -> u64 {
        self.entries.iter().map(LedgerEntry::bits).sum()
    }

    /// Bits on the edges with `mask[e]`.
    pub fn bits_on(&self, mask: &[bool]) -> u64 {
        self.entries
            .iter()
            .filter(|e| mask[e.edge as usize])
            .map(LedgerEntry::bits)
            .sum()
    }

    pub fn per_edge(&self, m: usize) -> Vec<u64> {
        let mut out = vec![0; m];
        for e in &self.entries {
            out[e.edge as usize] += e.bits();
        }
        out
    }

    pub fn per_round(&self) -> Vec<(u32, u64)> {
        let mut out: Vec<(u32, u64)> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some((r, bits)) if *r == e.round => *bits += e.bits(),
                _ => out.push((e.round, e.bits())),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<O> {
    pub rounds_used: u64,
    pub outputs: Vec<Option<O>>,
    /// Round in which each node first produced its output.
    pub output_rounds: Vec<Option<u64>>,
    pub ledger: TrafficLedger,
    pub terminated: bool,
}

/// For each `(u, port)`, the port of `u` at the neighbor.
pub(crate) struct PortMap {
    pub(crate) reverse: Vec<Vec<usize>>,
}

impl PortMap {
    pub(crate) fn new<W: Weight>(g: &Graph<W>) -> Self {
        let reverse = (0..g.n())
            .map(|u| {
                g.neighbors(u)
                    .iter()
                    .map(|&(v, _)| {
                        g.neighbors(v)
                            .binary_search_by_key(&u, |&(x, _)| x)
                            .expect("adjacency is symmetric")
                    })
                    .collect()
            })
            .collect();
        PortMap { reverse }
    }
}

/// Per-node bookkeeping shared by the monolithic and two-party runners.
pub(crate) struct Slot<S, O> {
    pub(crate) state: S,
    pub(crate) output: Option<O>,
    pub(crate) output_round: Option<u64>,
}

pub(crate) fn context<'a, W: Weight>(
    g: &Graph<W>,
    u: NodeId,
    params: &'a PublicParams,
    marks: Option<&[bool]>,
    seed: u64,
) -> NodeContext<'a> {
    let marked_ports = g
        .neighbors(u)
        .iter()
        .map(|&(_, e)| marks.is_none_or(|m| m[e]))
        .collect();
    NodeContext {
        id: u,
        degree: g.degree(u),
        params,
        marked_ports,
        seed,
    }
}

pub(crate) fn check_budget<P: NodeProgram>(prog: &P, params: &PublicParams, b: usize) -> Result<(), SimError> {
    if b == 0 {
        return Err(SimError::ZeroBudget);
    }
    let needed = prog.min_bits(params);
    if b < needed {
        return Err(SimError::BudgetTooSmall { b, needed });
    }
    Ok(())
}

/// Validates an outbox and reports whether it carries any message.
pub(crate) fn check_outbox(
    node: NodeId,
    round: u64,
    degree: usize,
    outbox: &[Option<Message>],
    b: usize,
) -> Result<bool, SimError> {
    if !outbox.is_empty() && outbox.len() != degree {
        return Err(SimError::BadOutbox {
            node,
            round,
            len: outbox.len(),
            degree,
        });
    }
    let mut any = false;
    for msg in outbox.iter().flatten() {
        if msg.len() > b {
            return Err(SimError::ProtocolViolation {
                node,
                round,
                bits: msg.len(),
                limit: b,
            });
        }
        any = true;
    }
    Ok(any)
}

pub(crate) fn record_output<S, O: PartialEq>(
    slot: &mut Slot<S, O>,
    node: NodeId,
    round: u64,
    out: Option<O>,
) -> Result<(), SimError> {
    let Some(out) = out else { return Ok(()) };
    match &slot.output {
        Some(prev) if *prev != out => Err(SimError::OutputChanged { node, round }),
        Some(_) => Ok(()),
        None => {
            slot.output = Some(out);
            slot.output_round = Some(round);
            Ok(())
        }
    }
}

/// Adds the bits of one round to `acc`, keyed by edge.
pub(crate) fn tally<W: Weight>(
    g: &Graph<W>,
    u: NodeId,
    outbox: &[Option<Message>],
    acc: &mut BTreeMap<EdgeId, (u16, u16)>,
) {
    for (p, msg) in outbox.iter().enumerate() {
        if let Some(msg) = msg {
            let (v, e) = g.neighbors(u)[p];
            let entry = acc.entry(e).or_default();
            if u < v {
                entry.0 += msg.len() as u16;
            } else {
                entry.1 += msg.len() as u16;
            }
        }
    }
}

pub(crate) fn is_connected<W: Weight>(g: &Graph<W>) -> bool {
    g.n() == 0 || crate::distance::bfs_hops(g, 0).iter().all(|&d| d != u32::MAX)
}

/// Runs `prog` on every node of `g` until all nodes have output and one
/// round passes with no message, or until `max_rounds`.
///
/// `marks` is an optional edge mask exposed to nodes as `marked_ports`.
pub fn run<P: NodeProgram, W: Weight>(
    g: &Graph<W>,
    prog: &P,
    params: &PublicParams,
    marks: Option<&[bool]>,
    cfg: SimConfig,
) -> Result<RunOutcome<P::Output>, SimError> {
    check_budget(prog, params, cfg.b)?;
    if !is_connected(g) {
        return Err(SimError::Disconnected);
    }
    let ports = PortMap::new(g);
    let mut slots: Vec<Slot<P::State, P::Output>> = (0..g.n())
        .map(|u| Slot {
            state: prog.init(&context(g, u, params, marks, cfg.seed)),
            output: None,
            output_round: None,
        })
        .collect();
    let mut ledger = TrafficLedger::default();
    let mut terminated = false;
    let mut rounds_used = cfg.max_rounds;

    for round in 1..=cfg.max_rounds {
        let mut outboxes = Vec::with_capacity(g.n());
        let mut silent = true;
        for (u, slot) in slots.iter_mut().enumerate() {
            let outbox = prog.send(&mut slot.state, round);
            silent &= !check_outbox(u, round, g.degree(u), &outbox, cfg.b)?;
            outboxes.push(outbox);
        }
        if silent && slots.iter().all(|s| s.output.is_some()) {
            terminated = true;
            rounds_used = round - 1;
            break;
        }

        let mut acc = BTreeMap::new();
        for (u, outbox) in outboxes.iter().enumerate() {
            tally(g, u, outbox, &mut acc);
        }
        ledger.entries.extend(acc.into_iter().map(|(e, (f, b))| LedgerEntry {
            round: round as u32,
            edge: e as u32,
            forward: f,
            backward: b,
        }));

        let mut inboxes: Vec<Vec<Option<Message>>> = (0..g.n()).map(|u| vec![None; g.degree(u)]).collect();
        for (u, outbox) in outboxes.into_iter().enumerate() {
            for (p, msg) in outbox.into_iter().enumerate() {
                if let Some(msg) = msg {
                    let v = g.neighbors(u)[p].0;
                    inboxes[v][ports.reverse[u][p]] = Some(msg);
                }
            }
        }
        for (u, (slot, inbox)) in slots.iter_mut().zip(&inboxes).enumerate() {
            let out = prog.receive(&mut slot.state, round, inbox);
            record_output(slot, u, round, out)?;
        }
    }

    Ok(RunOutcome {
        rounds_used,
        output_rounds: slots.iter().map(|s| s.output_round).collect(),
        outputs: slots.into_iter().map(|s| s.output).collect(),
        ledger,
        terminated,
    })
}

/// Appends `value` as `width` bits, least significant first.
pub fn push_uint(msg: &mut Message, value: u64, width: usize) {
    for i in 0..width {
        msg.push((value >> i) & 1 == 1);
    }
}

/// Reads `width` bits at `offset`, least significant first.
pub fn read_uint(msg: &BitSlice<u64, Lsb0>, offset: usize, width: usize) -> u64 {
    (0..width).fold(0, |acc, i| acc | ((msg[offset + i] as u64) << i))
}
