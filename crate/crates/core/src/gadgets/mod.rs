//! Lower-bound instance families and their Alice/Bob partitions.
//!
//! Conventions shared by every construction:
//!
//! * `k = 2^w`, and bit `j` of index `i` is `(i >> j) & 1` (least significant first).
//! * Alice owns the `L` side (`ℓ_i`, `F`, `T`, left hubs, `x` nodes), Bob the
//!   `R` side. Path and tree nodes belong to the side of their endpoints.
//! * The cut is every edge whose endpoints have different owners.

mod const_degree;
mod degree_reduce;
mod diameter;
mod eccentricity;
mod radius;
mod stretch;

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Built, EdgeId, Graph, GraphError, Owner};
use crate::label::{CopyTag, HubLevel, NodeLabel, Role};
use crate::scalar::exact_log2;

pub use const_degree::radius_const_degree;
pub use degree_reduce::degree_reduce;
pub use diameter::{diameter_approx, diameter_exact};
pub use eccentricity::eccentricity_gadget;
pub use radius::{radius_approx, radius_exact};
pub use stretch::{min_stretch_p, StretchProblem};

/// Bit string; index 0 is the first character of the text form.
pub type Bits = BitVec<u64, Lsb0>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("k = {0} must be a power of two and at least 4")]
    BadK(u32),
    #[error("k = {0}: log2 k must itself be a power of two and k at least 16")]
    BadConstDegreeK(u32),
    #[error("P must be at least 1")]
    BadP,
    #[error("input strings must have length {expected}, got {sa} and {sb}")]
    LengthMismatch { expected: usize, sa: usize, sb: usize },
    #[error("construction expects polarity {expected:?}, input has {got:?}")]
    Polarity { expected: Polarity, got: Polarity },
    #[error("eps = {0} is outside the admissible range")]
    EpsOutOfRange(String),
    #[error("degree reduction needs at least 3 edges, got {0}")]
    TooFewEdges(usize),
    #[error("edge {0} is not incident to the reduced node")]
    NotIncident(EdgeId),
    #[error("edge {0} listed twice")]
    DuplicateEdge(EdgeId),
    #[error("node {0} has no owner")]
    Unowned(String),
    #[error("input edge {0} crosses the cut")]
    InputCrossesCut(String),
    #[error("spanner parameters: {0}")]
    Spanner(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How an input bit changes the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    EdgeOnZero,
    EdgeOnOne,
    RemoveOnZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitInput {
    pub sa: Bits,
    pub sb: Bits,
    pub polarity: Polarity,
}

impl BitInput {
    pub fn new(sa: Bits, sb: Bits, polarity: Polarity) -> Self {
        BitInput { sa, sb, polarity }
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// True iff some index is 1 in both strings.
    pub fn intersecting(&self) -> bool {
        self.sa.len() == self.sb.len() && self.sa.iter().zip(self.sb.iter()).any(|(a, b)| *a && *b)
    }

    fn check(&self, expected_len: usize, polarity: Polarity) -> Result<(), GadgetError> {
        if self.polarity != polarity {
            return Err(GadgetError::Polarity {
                expected: polarity,
                got: self.polarity,
            });
        }
        if self.sa.len() != expected_len || self.sb.len() != expected_len {
            return Err(GadgetError::LengthMismatch {
                expected: expected_len,
                sa: self.sa.len(),
                sb: self.sb.len(),
            });
        }
        Ok(())
    }

    fn bit(&self, side: Side, i: usize) -> bool {
        match side {
            Side::Left => self.sa[i],
            Side::Right => self.sb[i],
        }
    }
}

/// Parses a 0/1 string, or `0x`-prefixed hex (each digit expands to four
/// bits, most significant first).
pub fn parse_bits(text: &str) -> Option<Bits> {
    let text = text.trim();
    if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        let mut bits = Bits::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let d = c.to_digit(16)?;
            for shift in (0..4).rev() {
                bits.push((d >> shift) & 1 == 1);
            }
        }
        return Some(bits);
    }
    text.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn render_bits(bits: &BitSlice<u64, Lsb0>) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// The seven instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    DiameterExact,
    DiameterApprox,
    RadiusExact,
    RadiusApprox,
    Eccentricity,
    RadiusConstDegree,
    Spanner,
}

impl Construction {
    pub const ALL: [Construction; 7] = [
        Construction::DiameterExact,
        Construction::DiameterApprox,
        Construction::RadiusExact,
        Construction::RadiusApprox,
        Construction::Eccentricity,
        Construction::RadiusConstDegree,
        Construction::Spanner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::DiameterExact => "diameter-exact",
            Construction::DiameterApprox => "diameter-approx",
            Construction::RadiusExact => "radius-exact",
            Construction::RadiusApprox => "radius-approx",
            Construction::Eccentricity => "eccentricity",
            Construction::RadiusConstDegree => "radius-const-degree",
            Construction::Spanner => "spanner",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Construction::DiameterExact | Construction::DiameterApprox => Polarity::EdgeOnZero,
            Construction::RadiusConstDegree => Polarity::RemoveOnZero,
            _ => Polarity::EdgeOnOne,
        }
    }

    /// Whether the family takes a stretch length `P`.
    pub fn uses_p(self) -> bool {
        matches!(
            self,
            Construction::DiameterApprox | Construction::RadiusApprox | Construction::Eccentricity
        )
    }

    pub fn supports_shaved(self) -> bool {
        matches!(self, Construction::RadiusExact | Construction::RadiusApprox)
    }

    /// Required input length.
    pub fn input_len(self, k: u32, shaved: bool) -> usize {
        if shaved && self.supports_shaved() {
            k as usize * log2k(k).unwrap_or(0) as usize
        } else {
            k as usize
        }
    }

    /// Size of the Alice/Bob cut for `k = 2^w`.
    pub fn cut_size(self, k: u32, shaved: bool) -> usize {
        let w = log2k(k).unwrap_or(0) as usize;
        match self {
            Construction::DiameterExact => 2 * w + 2,
            Construction::RadiusExact if shaved => 3 * w,
            Construction::RadiusApprox if shaved => 2 * 3 * w,
            Construction::RadiusApprox => 2 * (2 * w + 1),
            _ => 2 * w + 1,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown construction {s:?}"))
    }
}

/// Parameters shared by the distance constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub k: u32,
    pub p: u32,
    pub shaved: bool,
}

impl ConstructionParams {
    pub fn new(k: u32) -> Self {
        ConstructionParams {
            k,
            p: 1,
            shaved: false,
        }
    }

    pub fn with_p(mut self, p: u32) -> Self {
        self.p = p;
        self
    }

    pub fn shaved(mut self, shaved: bool) -> Self {
        self.shaved = shaved;
        self
    }

    /// `log2 k`, validating `k`.
    pub fn w(&self) -> Result<u32, GadgetError> {
        log2k(self.k).ok_or(GadgetError::BadK(self.k))
    }

    fn checked_p(&self) -> Result<u32, GadgetError> {
        if self.p == 0 {
            Err(GadgetError::BadP)
        } else {
            Ok(self.p)
        }
    }
}

pub(crate) fn log2k(k: u32) -> Option<u32> {
    exact_log2(k as u64).filter(|&w| w >= 2)
}

/// Construction metadata, serialized as the `params` object of the graph file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub construction: Construction,
    pub k: u32,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default)]
    pub shaved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    #[serde(default)]
    pub weighted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clique_pad: Option<u32>,
    pub sa: String,
    pub sb: String,
}

/// A built instance: graph, owners, cut and the input-dependent edges.
#[derive(Clone, Debug)]
pub struct Instance {
    pub meta: InstanceMeta,
    pub graph: Graph,
    pub owners: Vec<Owner>,
    pub cut: Vec<EdgeId>,
    pub input_edges: Vec<EdgeId>,
    pub input: BitInput,
    /// Spanner instances only: the edges of `H`.
    pub h_edges: Option<Vec<EdgeId>>,
}

impl Instance {
    pub(crate) fn from_built(built: Built<u32>, meta: InstanceMeta, input: BitInput) -> Result<Self, GadgetError> {
        let Built {
            graph,
            owners,
            input_edges,
        } = built;
        let owners = owners
            .into_iter()
            .enumerate()
            .map(|(u, o)| o.ok_or_else(|| GadgetError::Unowned(graph.label(u).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let cut: Vec<EdgeId> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| owners[u] != owners[v])
            .map(|(e, _)| e)
            .collect();
        for &e in &input_edges {
            let (u, v) = graph.edge(e);
            if owners[u] != owners[v] {
                return Err(GadgetError::InputCrossesCut(format!(
                    "{} -- {}",
                    graph.label(u),
                    graph.label(v)
                )));
            }
        }
        Ok(Instance {
            meta,
            graph,
            owners,
            cut,
            input_edges,
            input,
            h_edges: None,
        })
    }

    pub fn construction(&self) -> Construction {
        self.meta.construction
    }

    pub fn k(&self) -> u32 {
        self.meta.k
    }

    /// Stretch length; 1 for the unstretched families.
    pub fn p(&self) -> u32 {
        self.meta.p.unwrap_or(1)
    }

    pub fn node(&self, label: &NodeLabel) -> Option<usize> {
        self.graph.id_of(label)
    }

    /// Ids of `ℓ_0..ℓ_{k-1}` in the given copy.
    pub fn side_nodes(&self, side: Side, copy: CopyTag) -> Vec<usize> {
        (0..self.k())
            .filter_map(|i| self.node(&side.node(i).in_copy(copy)))
            .collect()
    }

    /// H as a boolean mask over edges (all edges when not a spanner instance).
    pub fn h_mask(&self) -> Vec<bool> {
        match &self.h_edges {
            Some(h) => {
                let mut mask = vec![false; self.graph.edge_count()];
                for &e in h {
                    mask[e] = true;
                }
                mask
            }
            None => vec![true; self.graph.edge_count()],
        }
    }

    pub fn ground_truth_intersecting(&self) -> bool {
        self.input.intersecting()
    }
}

/// One side of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn owner(self) -> Owner {
        match self {
            Side::Left => Owner::Alice,
            Side::Right => Owner::Bob,
        }
    }

    /// `ℓ_i` or `r_i`.
    pub fn node(self, i: u32) -> NodeLabel {
        match self {
            Side::Left => NodeLabel::l(i),
            Side::Right => NodeLabel::r(i),
        }
    }

    /// `ℓ′_i` or `r′_i`.
    pub fn prime(self, i: u32) -> NodeLabel {
        match self {
            Side::Left => NodeLabel::l_prime(i),
            Side::Right => NodeLabel::r_prime(i),
        }
    }

    pub fn hub(self, level: HubLevel) -> NodeLabel {
        match self {
            Side::Left => NodeLabel::hub_l(level),
            Side::Right => NodeLabel::hub_r(level),
        }
    }

    pub fn split_hub(self, j: u32) -> NodeLabel {
        match self {
            Side::Left => NodeLabel::new(Role::HubLSplit(j)),
            Side::Right => NodeLabel::new(Role::HubRSplit(j)),
        }
    }

    /// The bit-gadget node for bit `j` with value `value`: `f_j`/`t_j` on the
    /// left, `f′_j`/`t′_j` on the right.
    pub fn bit_node(self, j: u32, value: bool) -> NodeLabel {
        match (self, value) {
            (Side::Left, false) => NodeLabel::f(j),
            (Side::Left, true) => NodeLabel::t(j),
            (Side::Right, false) => NodeLabel::f_prime(j),
            (Side::Right, true) => NodeLabel::t_prime(j),
        }
    }
}

pub(crate) fn bit_of(i: u32, j: u32) -> bool {
    (i >> j) & 1 == 1
}

/// Adds `L`/`R` and the bit-gadget node sets of one side, plus the given hub
/// levels, all in `copy` and owned by the side's player.
pub(crate) fn add_side_nodes(
    b: &mut crate::graph::GraphBuilder<u32>,
    side: Side,
    k: u32,
    w: u32,
    hubs: &[HubLevel],
    copy: CopyTag,
) {
    let owner = Some(side.owner());
    for i in 0..k {
        b.node(side.node(i).in_copy(copy), owner);
    }
    for j in 0..w {
        for value in [false, true] {
            b.node(side.bit_node(j, value).in_copy(copy), owner);
        }
    }
    for &level in hubs {
        b.node(side.hub(level).in_copy(copy), owner);
    }
}

/// The `2w` bit-gadget crossing edges `(f_j, t′_j)` and `(t_j, f′_j)`.
pub(crate) fn add_crossings(
    b: &mut crate::graph::GraphBuilder<u32>,
    w: u32,
    copy: CopyTag,
) -> Result<(), GraphError> {
    for j in 0..w {
        for value in [false, true] {
            b.edge(
                &Side::Left.bit_node(j, value).in_copy(copy),
                &Side::Right.bit_node(j, !value).in_copy(copy),
            )?;
        }
    }
    Ok(())
}

pub(crate) fn meta_for(construction: Construction, params: &ConstructionParams, input: &BitInput) -> InstanceMeta {
    InstanceMeta {
        construction,
        k: params.k,
        p: construction.uses_p().then_some(params.p),
        shaved: params.shaved,
        alpha: None,
        beta: None,
        x: None,
        weighted: false,
        clique_pad: None,
        sa: render_bits(&input.sa),
        sb: render_bits(&input.sb),
    }
}

/// Builds any distance construction from its metadata-level parameters.
pub fn build(construction: Construction, params: &ConstructionParams, input: &BitInput) -> Result<Instance, GadgetError> {
    match construction {
        Construction::DiameterExact => diameter_exact(params, input),
        Construction::DiameterApprox => diameter_approx(params, input),
        Construction::RadiusExact => radius_exact(params, input),
        Construction::RadiusApprox => radius_approx(params, input),
        Construction::Eccentricity => eccentricity_gadget(params, input),
        Construction::RadiusConstDegree => radius_const_degree(params, input),
        Construction::Spanner => Err(GadgetError::Spanner(
            "use spanner::build_spanner_instance".into(),
        )),
    }
}
