//! Graph files, DOT export and ledger export.
//!
//! An instance file stores the construction parameters next to the explicit
//! graph. Loading rebuilds the instance from the parameters and rejects the
//! file unless nodes, edges, owners and cut all match.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadgets::{build, parse_bits, BitInput, Construction, ConstructionParams, GadgetError, Instance, InstanceMeta};
use crate::graph::Owner;
use crate::label::{LabelParseError, NodeLabel};
use crate::scalar::parse_rational;
use crate::sim::TrafficLedger;
use crate::spanner::{build_spanner_instance, SpannerParams};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported file version {0}")]
    Version(u32),
    #[error("bad label: {0}")]
    Label(#[from] LabelParseError),
    #[error("bad parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("file does not match its parameters: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub label: String,
    pub owner: Owner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub construction: Construction,
    pub params: InstanceMeta,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub cut: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_edges: Option<Vec<usize>>,
}

pub fn to_file(inst: &Instance) -> GraphFile {
    let g = &inst.graph;
    GraphFile {
        version: FORMAT_VERSION,
        construction: inst.construction(),
        params: inst.meta.clone(),
        nodes: (0..g.n())
            .map(|u| NodeRecord {
                id: u,
                label: g.label(u).to_string(),
                owner: inst.owners[u],
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| EdgeRecord {
                u,
                v,
                w: g.is_weighted().then(|| g.weight(e) as u64),
            })
            .collect(),
        cut: inst.cut.clone(),
        h_edges: inst.h_edges.clone(),
    }
}

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&to_file(inst)).expect("graph file serializes")
}

/// Rebuilds an instance from its recorded parameters.
pub fn instance_from_meta(meta: &InstanceMeta) -> Result<Instance, IoError> {
    let bits = |s: &str| parse_bits(s).ok_or_else(|| IoError::Param(format!("bad bit string {s:?}")));
    let c = meta.construction;
    let input = BitInput::new(bits(&meta.sa)?, bits(&meta.sb)?, c.polarity());
    let inst = if c == Construction::Spanner {
        let rational = |name: &str, s: &Option<String>| {
            s.as_deref()
                .and_then(parse_rational)
                .ok_or_else(|| IoError::Param(format!("missing or bad {name}")))
        };
        let params = SpannerParams::new(
            rational("alpha", &meta.alpha)?,
            rational("beta", &meta.beta)?,
            meta.x.ok_or_else(|| IoError::Param("missing x".into()))?,
        )
        .weighted(meta.weighted)
        .clique_pad(meta.clique_pad);
        build_spanner_instance(&params, meta.k, &input)?
    } else {
        let params = ConstructionParams::new(meta.k)
            .with_p(meta.p.unwrap_or(1))
            .shaved(meta.shaved);
        build(c, &params, &input)?
    };
    Ok(inst)
}

pub fn from_file(file: &GraphFile) -> Result<Instance, IoError> {
    if file.version != FORMAT_VERSION {
        return Err(IoError::Version(file.version));
    }
    if file.construction != file.params.construction {
        return Err(IoError::Mismatch("construction differs from params".into()));
    }
    for node in &file.nodes {
        node.label.parse::<NodeLabel>()?;
    }
    let inst = instance_from_meta(&file.params)?;
    let expected = to_file(&inst);
    let check = |what: &str, ok: bool| if ok { Ok(()) } else { Err(IoError::Mismatch(what.into())) };
    check("nodes", expected.nodes == file.nodes)?;
    check("edges", expected.edges == file.edges)?;
    check("cut", expected.cut == file.cut)?;
    check("h_edges", expected.h_edges == file.h_edges)?;
    Ok(inst)
}

pub fn from_json(text: &str) -> Result<Instance, IoError> {
    from_file(&serde_json::from_str(text)?)
}

/// DOT rendering: Alice blue, Bob red, cut edges bold, input edges dashed,
/// edges outside H dotted.
pub fn to_dot(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::from("graph instance {\n  node [style=filled, fontsize=10];\n");
    for u in 0..g.n() {
        let color = match inst.owners[u] {
            Owner::Alice => "lightblue",
            Owner::Bob => "lightpink",
        };
        let _ = writeln!(out, "  n{u} [label=\"{}\", fillcolor={color}];", g.label(u));
    }
    let mut cut = vec![false; g.edge_count()];
    inst.cut.iter().for_each(|&e| cut[e] = true);
    let mut input = vec![false; g.edge_count()];
    inst.input_edges.iter().for_each(|&e| input[e] = true);
    let h = inst.h_mask();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mut attrs = Vec::new();
        if cut[e] {
            attrs.push("penwidth=2.5".to_string());
        }
        if input[e] {
            attrs.push("style=dashed".to_string());
        } else if !h[e] {
            attrs.push("style=dotted".to_string());
        }
        if g.is_weighted() {
            attrs.push(format!("label=\"{}\"", g.weight(e)));
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  n{u} -- n{v};");
        } else {
            let _ = writeln!(out, "  n{u} -- n{v} [{}];", attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}

/// `round,edge_u,edge_v,bits`, one line per nonzero entry.
pub fn ledger_csv<W: crate::scalar::Weight>(g: &crate::graph::Graph<W>, ledger: &TrafficLedger) -> String {
    let mut out = String::from("round,edge_u,edge_v,bits\n");
    for e in &ledger.entries {
        let (u, v) = g.edge(e.edge as usize);
        let _ = writeln!(out, "{},{},{},{}", e.round, u, v, e.bits());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerSummary {
    pub rounds: u64,
    pub total_bits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_cut_bits: Option<u64>,
}

pub fn ledger_summary(ledger: &TrafficLedger, rounds: u64, inst: Option<&Instance>) -> LedgerSummary {
    LedgerSummary {
        rounds,
        total_bits: ledger.total_bits(),
        per_cut_bits: inst.map(|inst| {
            let mut mask = vec![false; inst.graph.edge_count()];
            inst.cut.iter().for_each(|&e| mask[e] = true);
            ledger.bits_on(&mask)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn sample() -> Instance {
        let input = BitInput::new(
            parse_bits("0110").unwrap(),
            parse_bits("0100").unwrap(),
            Construction::RadiusExact.polarity(),
        );
        build(Construction::RadiusExact, &ConstructionParams::new(4), &input).unwrap()
    }

    #[test]
    fn json_roundtrip() {
        let inst = sample();
        let text = to_json(&inst);
        let back = from_json(&text).unwrap();
        assert_eq!(back.graph, inst.graph);
        assert_eq!(back.cut, inst.cut);
    }

    #[test]
    fn spanner_roundtrip_keeps_h() {
        let params = SpannerParams::new(Rational::from_integer(2), Rational::from_integer(4), 3).weighted(true);
        let input = BitInput::new(
            parse_bits("1000").unwrap(),
            parse_bits("1000").unwrap(),
            Construction::Spanner.polarity(),
        );
        let inst = build_spanner_instance(&params, 4, &input).unwrap();
        let back = from_json(&to_json(&inst)).unwrap();
        assert_eq!(back.h_edges, inst.h_edges);
        assert!(back.graph.is_weighted());
    }

    #[test]
    fn tampered_file_is_rejected() {
        let mut file = to_file(&sample());
        file.edges.pop();
        assert!(matches!(from_file(&file), Err(IoError::Mismatch(_))));
        let mut file = to_file(&sample());
        file.nodes[0].label = "l(".into();
        assert!(matches!(from_file(&file), Err(IoError::Label(_))));
    }

    #[test]
    fn dot_mentions_every_edge() {
        let inst = sample();
        let dot = to_dot(&inst);
        assert_eq!(dot.matches(" -- ").count(), inst.graph.edge_count());
        assert_eq!(dot.matches("penwidth").count(), inst.cut.len());
    }
}
