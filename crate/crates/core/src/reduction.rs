//! Two-party simulation of a distributed run on a constructed instance.
//!
//! Alice advances only the nodes she owns and Bob only his. Per round each
//! party sends the other one frame holding exactly the messages that cross
//! the cut:
//!
//! ```text
//! frame  := entry* 0 status
//! entry  := 1 edge_index[ceil(log2 |cut|)] length[ceil(log2 (b+1))] payload[length]
//! ```
//!
//! `status` is 1 when all of the sender's nodes have output and none of them
//! sent anything this round. Both statuses at 1 ends the run; that last
//! status exchange is charged to the round in which it happens.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::gadgets::{Construction, Instance, Side};
use crate::graph::{EdgeId, Graph, NodeId, Owner};
use crate::label::{CopyTag, NodeLabel};
use crate::scalar::{ceil_log2, render_rational, Rational};
use crate::sim::{
    self, check_budget, check_outbox, context, record_output, run, ApspDiameter, ApspOutput, Message, NodeProgram,
    PublicParams, RunOutcome, SimConfig, SimError, SpannerCheck, Slot,
};
use crate::spanner::params_of;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Answer {
    Disjoint,
    Intersecting,
}

impl Answer {
    pub fn from_intersecting(yes: bool) -> Self {
        if yes {
            Answer::Intersecting
        } else {
            Answer::Disjoint
        }
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("run did not terminate within {0} rounds")]
    NotTerminated(u64),
    #[error("node {0} produced no output")]
    MissingOutput(NodeId),
    #[error("nodes {0} and {1} disagree on the global value")]
    Disagreement(NodeId, NodeId),
    #[error("the harness runs hop-count programs and needs an unweighted instance")]
    Weighted,
    #[error("malformed frame: {0}")]
    Frame(String),
    #[error("instance carries no spanner parameters")]
    NotSpanner,
}

/// Set-Disjointness answer for the instance input.
pub fn ground_truth(inst: &Instance) -> Answer {
    Answer::from_intersecting(inst.ground_truth_intersecting())
}

/// `ceil(c * k_bits / (cut * 2b))`.
pub fn implied_round_lower_bound(k_bits: u64, cut_size: u64, b: u64, c_disj: Rational) -> u64 {
    let denom = Rational::from_integer((cut_size * 2 * b) as i64);
    let q = c_disj * Rational::from_integer(k_bits as i64) / denom;
    q.ceil().to_integer().max(0) as u64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundTraffic {
    pub round: u64,
    pub a_to_b: u64,
    pub b_to_a: u64,
    pub framing_a_to_b: u64,
    pub framing_b_to_a: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    /// Payload bits only.
    pub bits_a_to_b: u64,
    pub bits_b_to_a: u64,
    /// Flags, edge indices, length prefixes, terminators and status bits.
    pub framing_bits: u64,
    pub per_round: Vec<RoundTraffic>,
    pub rounds: u64,
    pub answer: Answer,
}

impl Transcript {
    pub fn payload_bits(&self) -> u64 {
        self.bits_a_to_b + self.bits_b_to_a
    }
}

#[derive(Clone, Debug)]
pub struct TwoPartyRun<O> {
    pub transcript: Transcript,
    pub outputs: Vec<Option<O>>,
    pub output_rounds: Vec<Option<u64>>,
}

/// Fixed frame layout shared by both parties.
struct Framing<'a> {
    cut: &'a [EdgeId],
    index: HashMap<EdgeId, usize>,
    idx_bits: usize,
    len_bits: usize,
}

impl<'a> Framing<'a> {
    fn new(cut: &'a [EdgeId], b: usize) -> Self {
        Framing {
            cut,
            index: cut.iter().enumerate().map(|(i, &e)| (e, i)).collect(),
            idx_bits: ceil_log2(cut.len() as u64) as usize,
            len_bits: ceil_log2(b as u64 + 1) as usize,
        }
    }

    fn encode(&self, mut entries: Vec<(usize, Message)>, status: bool) -> Message {
        entries.sort_by_key(|(i, _)| *i);
        let mut f = Message::new();
        for (i, payload) in entries {
            f.push(true);
            sim::push_uint(&mut f, i as u64, self.idx_bits);
            sim::push_uint(&mut f, payload.len() as u64, self.len_bits);
            f.extend_from_bitslice(&payload);
        }
        f.push(false);
        f.push(status);
        f
    }

    /// Returns (cut index, payload) entries and the status bit.
    fn decode(&self, f: &Message) -> Result<(Vec<(usize, Message)>, bool), ReductionError> {
        let short = || ReductionError::Frame("truncated".into());
        let mut pos = 0;
        let mut out = Vec::new();
        loop {
            let flag = *f.get(pos).ok_or_else(short)?;
            pos += 1;
            if !flag {
                break;
            }
            if pos + self.idx_bits + self.len_bits > f.len() {
                return Err(short());
            }
            let i = sim::read_uint(f, pos, self.idx_bits) as usize;
            pos += self.idx_bits;
            let len = sim::read_uint(f, pos, self.len_bits) as usize;
            pos += self.len_bits;
            if i >= self.cut.len() || pos + len > f.len() {
                return Err(ReductionError::Frame(format!("bad entry for cut index {i}")));
            }
            out.push((i, f[pos..pos + len].to_bitvec()));
            pos += len;
        }
        let status = *f.get(pos).ok_or_else(short)?;
        if pos + 1 != f.len() {
            return Err(ReductionError::Frame("trailing bits".into()));
        }
        Ok((out, status))
    }
}

/// One player's private view: its own nodes and their states.
struct Party<S, O> {
    owner: Owner,
    nodes: Vec<NodeId>,
    slots: Vec<Slot<S, O>>,
    /// Slot index of each owned node.
    local: HashMap<NodeId, usize>,
    inboxes: Vec<Vec<Option<Message>>>,
}

impl<S, O: PartialEq> Party<S, O> {
    fn new<P, W>(
        owner: Owner,
        inst_owners: &[Owner],
        g: &Graph<W>,
        prog: &P,
        params: &PublicParams,
        marks: Option<&[bool]>,
        seed: u64,
    ) -> Self
    where
        P: NodeProgram<State = S, Output = O>,
        W: crate::scalar::Weight,
    {
        let nodes: Vec<NodeId> = (0..g.n()).filter(|&u| inst_owners[u] == owner).collect();
        let slots = nodes
            .iter()
            .map(|&u| Slot {
                state: prog.init(&context(g, u, params, marks, seed)),
                output: None,
                output_round: None,
            })
            .collect();
        let local = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let inboxes = nodes.iter().map(|&u| vec![None; g.degree(u)]).collect();
        Party {
            owner,
            nodes,
            slots,
            local,
            inboxes,
        }
    }

    /// Send phase. Local messages go straight to the inboxes; the rest are
    /// returned as frame entries, along with this party's status bit.
    fn send<P, W>(
        &mut self,
        g: &Graph<W>,
        prog: &P,
        framing: &Framing<'_>,
        round: u64,
        b: usize,
    ) -> Result<(Vec<(usize, Message)>, bool), ReductionError>
    where
        P: NodeProgram<State = S, Output = O>,
        W: crate::scalar::Weight,
    {
        for inbox in &mut self.inboxes {
            inbox.iter_mut().for_each(|m| *m = None);
        }
        let mut entries = Vec::new();
        let mut silent = true;
        for i in 0..self.nodes.len() {
            let u = self.nodes[i];
            let outbox = prog.send(&mut self.slots[i].state, round);
            silent &= !check_outbox(u, round, g.degree(u), &outbox, b)?;
            for (p, msg) in outbox.into_iter().enumerate() {
                let Some(msg) = msg else { continue };
                let (v, e) = g.neighbors(u)[p];
                match self.local.get(&v) {
                    Some(&j) => {
                        let port = port_of(g, v, u);
                        self.inboxes[j][port] = Some(msg);
                    }
                    None => entries.push((framing.index[&e], msg)),
                }
            }
        }
        let done = silent && self.slots.iter().all(|s| s.output.is_some());
        Ok((entries, done))
    }

    fn deliver<W: crate::scalar::Weight>(&mut self, g: &Graph<W>, framing: &Framing<'_>, entries: Vec<(usize, Message)>) {
        for (i, msg) in entries {
            let (a, c) = g.edge(framing.cut[i]);
            let (mine, theirs) = if self.local.contains_key(&a) { (a, c) } else { (c, a) };
            let j = self.local[&mine];
            self.inboxes[j][port_of(g, mine, theirs)] = Some(msg);
        }
    }

    fn receive<P>(&mut self, prog: &P, round: u64) -> Result<(), ReductionError>
    where
        P: NodeProgram<State = S, Output = O>,
    {
        for i in 0..self.nodes.len() {
            let out = prog.receive(&mut self.slots[i].state, round, &self.inboxes[i]);
            record_output(&mut self.slots[i], self.nodes[i], round, out)?;
        }
        Ok(())
    }
}

fn port_of<W: crate::scalar::Weight>(g: &Graph<W>, at: NodeId, nbr: NodeId) -> usize {
    g.neighbors(at)
        .binary_search_by_key(&nbr, |&(x, _)| x)
        .expect("edge endpoints are adjacent")
}

/// Runs `prog` on `inst` as an Alice/Bob protocol and applies `decide` to the
/// per-node outputs.
pub fn simulate_two_party<P, D>(
    inst: &Instance,
    prog: &P,
    params: &PublicParams,
    marks: Option<&[bool]>,
    cfg: SimConfig,
    decide: D,
) -> Result<TwoPartyRun<P::Output>, ReductionError>
where
    P: NodeProgram,
    D: Fn(&[P::Output]) -> Result<Answer, ReductionError>,
{
    let g = &inst.graph;
    check_budget(prog, params, cfg.b)?;
    if !sim::is_connected(g) {
        return Err(SimError::Disconnected.into());
    }
    let framing = Framing::new(&inst.cut, cfg.b);
    let mut alice = Party::new(Owner::Alice, &inst.owners, g, prog, params, marks, cfg.seed);
    let mut bob = Party::new(Owner::Bob, &inst.owners, g, prog, params, marks, cfg.seed);

    let mut per_round = Vec::new();
    let mut rounds = None;
    for round in 1..=cfg.max_rounds {
        let (a_entries, a_done) = alice.send(g, prog, &framing, round, cfg.b)?;
        let (b_entries, b_done) = bob.send(g, prog, &framing, round, cfg.b)?;
        let a_payload: u64 = a_entries.iter().map(|(_, m)| m.len() as u64).sum();
        let b_payload: u64 = b_entries.iter().map(|(_, m)| m.len() as u64).sum();
        let a_frame = framing.encode(a_entries, a_done);
        let b_frame = framing.encode(b_entries, b_done);
        per_round.push(RoundTraffic {
            round,
            a_to_b: a_payload,
            b_to_a: b_payload,
            framing_a_to_b: a_frame.len() as u64 - a_payload,
            framing_b_to_a: b_frame.len() as u64 - b_payload,
        });

        // Each side reads only the other's frame.
        let (to_bob, a_status) = framing.decode(&a_frame)?;
        let (to_alice, b_status) = framing.decode(&b_frame)?;
        if a_status && b_status {
            rounds = Some(round - 1);
            break;
        }
        bob.deliver(g, &framing, to_bob);
        alice.deliver(g, &framing, to_alice);
        alice.receive(prog, round)?;
        bob.receive(prog, round)?;
    }
    let rounds = rounds.ok_or(ReductionError::NotTerminated(cfg.max_rounds))?;

    let mut outputs = vec![None; g.n()];
    let mut output_rounds = vec![None; g.n()];
    for party in [alice, bob] {
        debug_assert!(party.owner == Owner::Alice || party.owner == Owner::Bob);
        for (u, slot) in party.nodes.into_iter().zip(party.slots) {
            outputs[u] = slot.output;
            output_rounds[u] = slot.output_round;
        }
    }
    let finals: Vec<P::Output> = outputs
        .iter()
        .enumerate()
        .map(|(u, o)| o.clone().ok_or(ReductionError::MissingOutput(u)))
        .collect::<Result<_, _>>()?;
    let answer = decide(&finals)?;

    let transcript = Transcript {
        bits_a_to_b: per_round.iter().map(|r| r.a_to_b).sum(),
        bits_b_to_a: per_round.iter().map(|r| r.b_to_a).sum(),
        framing_bits: per_round.iter().map(|r| r.framing_a_to_b + r.framing_b_to_a).sum(),
        per_round,
        rounds,
        answer,
    };
    Ok(TwoPartyRun {
        transcript,
        outputs,
        output_rounds,
    })
}

/// Threshold rule matching each construction's reference algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecisionRule {
    /// Intersecting iff diameter >= t.
    DiameterAtLeast(u64),
    /// Intersecting iff diameter > t.
    DiameterAbove(u64),
    /// Intersecting iff radius <= t.
    RadiusAtMost(u64),
    /// Intersecting iff some node of L has eccentricity <= t.
    MinEccOverLAtMost(u64),
    /// Intersecting iff some node reports a violated spanner inequality.
    SpannerViolation,
}

impl DecisionRule {
    pub fn for_instance(inst: &Instance) -> Self {
        let p = inst.p() as u64;
        match inst.construction() {
            Construction::DiameterExact => DecisionRule::DiameterAtLeast(5),
            // gap is 4P+2 versus 6P+1
            Construction::DiameterApprox => DecisionRule::DiameterAbove(5 * p + 1),
            Construction::RadiusExact => DecisionRule::RadiusAtMost(3),
            // gap is 4P+1 versus 6P+1
            Construction::RadiusApprox => DecisionRule::RadiusAtMost(5 * p + 1),
            // gap is 3P+1 versus 5P+1
            Construction::Eccentricity => DecisionRule::MinEccOverLAtMost(4 * p + 1),
            Construction::RadiusConstDegree => {
                let w = inst.k().trailing_zeros() as u64;
                let ww = w.trailing_zeros() as u64;
                DecisionRule::RadiusAtMost(2 * ww + 2 * w - 1)
            }
            Construction::Spanner => DecisionRule::SpannerViolation,
        }
    }

    /// Applies the rule to APSP outputs, checking that all nodes agree on
    /// the global values.
    pub fn decide_apsp(self, inst: &Instance, outputs: &[ApspOutput]) -> Result<Answer, ReductionError> {
        if let Some(u) = outputs
            .iter()
            .position(|o| (o.diameter, o.radius) != (outputs[0].diameter, outputs[0].radius))
        {
            return Err(ReductionError::Disagreement(0, u));
        }
        let o = outputs[0];
        let yes = match self {
            DecisionRule::DiameterAtLeast(t) => o.diameter >= t,
            DecisionRule::DiameterAbove(t) => o.diameter > t,
            DecisionRule::RadiusAtMost(t) => o.radius <= t,
            DecisionRule::MinEccOverLAtMost(t) => inst
                .side_nodes(Side::Left, CopyTag::None)
                .into_iter()
                .any(|u| outputs[u].ecc <= t),
            DecisionRule::SpannerViolation => unreachable!("spanner rule reads boolean outputs"),
        };
        Ok(Answer::from_intersecting(yes))
    }

    pub fn threshold(self) -> Option<u64> {
        match self {
            DecisionRule::DiameterAtLeast(t)
            | DecisionRule::DiameterAbove(t)
            | DecisionRule::RadiusAtMost(t)
            | DecisionRule::MinEccOverLAtMost(t) => Some(t),
            DecisionRule::SpannerViolation => None,
        }
    }
}

/// Public parameters handed to every node of an instance.
pub fn public_params(inst: &Instance) -> PublicParams {
    PublicParams::new(inst.graph.n())
        .with("k", inst.k() as i64)
        .with("P", inst.p() as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub construction: Construction,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: u32,
    pub b: usize,
    pub cut_size: usize,
    pub k_bits: usize,
    pub rounds: u64,
    pub payload_bits: u64,
    pub framed_bits: u64,
    pub budget_bits: u64,
    pub answer: Answer,
    pub ground_truth: Answer,
    pub c_disj: String,
    pub implied_lower_bound: u64,
    pub rule: DecisionRule,
    pub transcript: Transcript,
}

impl ReductionReport {
    pub fn correct(&self) -> bool {
        self.answer == self.ground_truth
    }
}

/// Cross-check of a two-party run against the monolithic simulator.
#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub outputs_equal: bool,
    pub output_rounds_equal: bool,
    pub rounds_equal: bool,
    pub ledger_cut_bits: u64,
    pub payload_bits: u64,
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        self.outputs_equal && self.output_rounds_equal && self.rounds_equal && self.ledger_cut_bits == self.payload_bits
    }
}

fn compare<O: PartialEq>(inst: &Instance, two: &TwoPartyRun<O>, mono: &RunOutcome<O>) -> Equivalence {
    let mut mask = vec![false; inst.graph.edge_count()];
    for &e in &inst.cut {
        mask[e] = true;
    }
    Equivalence {
        outputs_equal: two.outputs == mono.outputs,
        output_rounds_equal: two.output_rounds == mono.output_rounds,
        rounds_equal: mono.terminated && two.transcript.rounds == mono.rounds_used,
        ledger_cut_bits: mono.ledger.bits_on(&mask),
        payload_bits: two.transcript.payload_bits(),
    }
}

/// Options for [`reduce`].
#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    /// Message size; defaults to `2 ceil(log2 n) + 2`.
    pub b: Option<usize>,
    pub max_rounds: Option<u64>,
    pub c_disj: Rational,
    /// Also run the monolithic simulator and compare.
    pub check_equivalence: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            b: None,
            max_rounds: None,
            c_disj: Rational::from_integer(1),
            check_equivalence: false,
        }
    }
}

/// Runs the construction's reference algorithm as a two-party protocol.
pub fn reduce(inst: &Instance, opts: ReduceOptions) -> Result<(ReductionReport, Option<Equivalence>), ReductionError> {
    if inst.graph.is_weighted() {
        return Err(ReductionError::Weighted);
    }
    let n = inst.graph.n();
    let cfg = SimConfig {
        b: opts.b.unwrap_or_else(|| sim::default_b(n)),
        max_rounds: opts.max_rounds.unwrap_or(6 * n as u64 + 10),
        seed: 0,
    };
    let params = public_params(inst);
    let rule = DecisionRule::for_instance(inst);

    let (transcript, equivalence) = if rule == DecisionRule::SpannerViolation {
        let sp = params_of(inst).ok_or(ReductionError::NotSpanner)?;
        let prog = SpannerCheck {
            alpha: sp.alpha,
            beta: sp.beta,
        };
        let mask = inst.h_mask();
        let decide = |outs: &[bool]| Ok(Answer::from_intersecting(outs.iter().any(|ok| !ok)));
        let two = simulate_two_party(inst, &prog, &params, Some(&mask), cfg, decide)?;
        let eq = if opts.check_equivalence {
            Some(compare(inst, &two, &run(&inst.graph, &prog, &params, Some(&mask), cfg)?))
        } else {
            None
        };
        (two.transcript, eq)
    } else {
        let decide = |outs: &[ApspOutput]| rule.decide_apsp(inst, outs);
        let two = simulate_two_party(inst, &ApspDiameter, &params, None, cfg, decide)?;
        let eq = if opts.check_equivalence {
            Some(compare(inst, &two, &run(&inst.graph, &ApspDiameter, &params, None, cfg)?))
        } else {
            None
        };
        (two.transcript, eq)
    };

    let cut_size = inst.cut.len();
    let k_bits = inst.input.len();
    let report = ReductionReport {
        construction: inst.construction(),
        k: inst.k(),
        p: inst.p(),
        b: cfg.b,
        cut_size,
        k_bits,
        rounds: transcript.rounds,
        payload_bits: transcript.payload_bits(),
        framed_bits: transcript.payload_bits() + transcript.framing_bits,
        budget_bits: transcript.rounds * cut_size as u64 * 2 * cfg.b as u64,
        answer: transcript.answer,
        ground_truth: ground_truth(inst),
        c_disj: render_rational(&opts.c_disj),
        implied_lower_bound: implied_round_lower_bound(k_bits as u64, cut_size as u64, cfg.b as u64, opts.c_disj),
        rule,
        transcript,
    };
    Ok((report, equivalence))
}

/// Renders a node for reports.
pub fn describe(inst: &Instance, u: NodeId) -> &NodeLabel {
    inst.graph.label(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build, parse_bits, BitInput, ConstructionParams};

    fn instance(c: Construction, k: u32, p: u32, sa: &str, sb: &str) -> Instance {
        let input = BitInput::new(parse_bits(sa).unwrap(), parse_bits(sb).unwrap(), c.polarity());
        build(c, &ConstructionParams::new(k).with_p(p), &input).unwrap()
    }

    #[test]
    fn lower_bound_arithmetic() {
        let one = Rational::from_integer(1);
        assert_eq!(implied_round_lower_bound(1024, 22, 32, one), 1);
        assert_eq!(implied_round_lower_bound(10_000, 10, 10, one), 50);
        assert_eq!(implied_round_lower_bound(10_000, 20, 10, one), 25);
        assert_eq!(implied_round_lower_bound(10_001, 10, 10, Rational::new(1, 2)), 26);
    }

    #[test]
    fn frame_roundtrip() {
        let cut = [3, 7, 9];
        let f = Framing::new(&cut, 6);
        let entries = vec![(2, Message::repeat(true, 6)), (0, Message::repeat(false, 1))];
        let frame = f.encode(entries, false);
        // two entries with 1 + 2 + 3 framing bits each, 7 payload bits, terminator, status
        assert_eq!(frame.len(), 2 * 6 + 7 + 2);
        let (back, status) = f.decode(&frame).unwrap();
        assert!(!status);
        assert_eq!(back[0], (0, Message::repeat(false, 1)));
        assert_eq!(back[1], (2, Message::repeat(true, 6)));
    }

    #[test]
    fn diameter_exact_examples() {
        for (sa, sb, want) in [
            ("1000", "1000", Answer::Intersecting),
            ("1010", "0101", Answer::Disjoint),
        ] {
            let inst = instance(Construction::DiameterExact, 4, 1, sa, sb);
            let opts = ReduceOptions {
                check_equivalence: true,
                ..Default::default()
            };
            let (report, eq) = reduce(&inst, opts).unwrap();
            assert_eq!(report.answer, want);
            assert!(report.correct());
            assert!(report.payload_bits <= report.budget_bits);
            assert!(eq.unwrap().holds());
        }
    }

    #[test]
    fn spanner_reduction() {
        use crate::spanner::{build_spanner_instance, SpannerParams};
        let params = SpannerParams::new(Rational::from_integer(1), Rational::from_integer(3), 1);
        for (sa, sb) in [("0110", "0100"), ("0110", "1001")] {
            let input = BitInput::new(
                parse_bits(sa).unwrap(),
                parse_bits(sb).unwrap(),
                Construction::Spanner.polarity(),
            );
            let inst = build_spanner_instance(&params, 4, &input).unwrap();
            let opts = ReduceOptions {
                check_equivalence: true,
                ..Default::default()
            };
            let (report, eq) = reduce(&inst, opts).unwrap();
            assert!(report.correct(), "{sa} {sb}");
            assert!(eq.unwrap().holds());
        }
    }
}
