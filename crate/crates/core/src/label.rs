//! Structured node identities.
//!
//! Every node of every construction carries a [`NodeLabel`]. Node ids are
//! assigned by sorting labels in canonical order, so two builds of the same
//! instance produce identical graphs, reports and transcripts.
//!
//! Text grammar (the `label` field of the graph JSON):
//!
//! ```text
//! label  := base copy?
//! copy   := "@1" | "@2"
//! base   := "l" N | "r" N | "l'" N | "r'" N          (sides and primed sides)
//!         | "f" N | "t" N | "f'" N | "t'" N          (bit gadget)
//!         | "lk" | "lk+1" | "lk+2" | "rk" | "rk+1" | "rk+2"
//!         | "lk+1^" N | "rk+1^" N                    (split hubs)
//!         | "a" | "b" | "x" N | "pad" N
//!         | "y(" label "," label "," N ")"           (structural path node)
//!         | "yi(" label "," label "," N ")"          (input path node)
//!         | "tr(" label "," N "," N ")"              (tree node: root, tree id, heap position)
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Which hub of a side: `ℓ_k`, `ℓ_{k+1}` or `ℓ_{k+2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HubLevel {
    K,
    K1,
    K2,
}

impl HubLevel {
    fn suffix(self) -> &'static str {
        match self {
            HubLevel::K => "k",
            HubLevel::K1 => "k+1",
            HubLevel::K2 => "k+2",
        }
    }
}

/// Distinguishes parallel paths between the same two endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lane {
    /// Part of the fixed construction.
    Structural,
    /// Added because of an input bit.
    Input,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CopyTag {
    #[default]
    None,
    Copy1,
    Copy2,
}

impl CopyTag {
    pub fn from_index(c: u8) -> CopyTag {
        match c {
            1 => CopyTag::Copy1,
            2 => CopyTag::Copy2,
            _ => CopyTag::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    L(u32),
    R(u32),
    LPrime(u32),
    RPrime(u32),
    F(u32),
    T(u32),
    FPrime(u32),
    TPrime(u32),
    HubL(HubLevel),
    HubR(HubLevel),
    HubLSplit(u32),
    HubRSplit(u32),
    A,
    B,
    X(u8),
    PathNode {
        a: Box<NodeLabel>,
        b: Box<NodeLabel>,
        lane: Lane,
        step: u32,
    },
    TreeNode {
        root: Box<NodeLabel>,
        tree: u32,
        position: u32,
    },
    CliquePad(u32),
}

impl Role {
    /// Rank of the role tag, the primary key of the canonical order.
    pub fn rank(&self) -> u8 {
        match self {
            Role::L(_) => 0,
            Role::R(_) => 1,
            Role::LPrime(_) => 2,
            Role::RPrime(_) => 3,
            Role::F(_) => 4,
            Role::T(_) => 5,
            Role::FPrime(_) => 6,
            Role::TPrime(_) => 7,
            Role::HubL(_) => 8,
            Role::HubR(_) => 9,
            Role::HubLSplit(_) => 10,
            Role::HubRSplit(_) => 11,
            Role::A => 12,
            Role::B => 13,
            Role::X(_) => 14,
            Role::PathNode { .. } => 15,
            Role::TreeNode { .. } => 16,
            Role::CliquePad(_) => 17,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeLabel {
    pub role: Role,
    pub copy: CopyTag,
}

// Canonical order: role tag rank, then copy, then the role's own fields.
impl Ord for NodeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.role
            .rank()
            .cmp(&other.role.rank())
            .then(self.copy.cmp(&other.copy))
            .then_with(|| self.role.cmp(&other.role))
    }
}

impl PartialOrd for NodeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl NodeLabel {
    pub fn new(role: Role) -> Self {
        NodeLabel {
            role,
            copy: CopyTag::None,
        }
    }

    pub fn in_copy(mut self, copy: CopyTag) -> Self {
        self.copy = copy;
        self
    }

    pub fn l(i: u32) -> Self {
        Self::new(Role::L(i))
    }
    pub fn r(i: u32) -> Self {
        Self::new(Role::R(i))
    }
    pub fn l_prime(i: u32) -> Self {
        Self::new(Role::LPrime(i))
    }
    pub fn r_prime(i: u32) -> Self {
        Self::new(Role::RPrime(i))
    }
    pub fn f(j: u32) -> Self {
        Self::new(Role::F(j))
    }
    pub fn t(j: u32) -> Self {
        Self::new(Role::T(j))
    }
    pub fn f_prime(j: u32) -> Self {
        Self::new(Role::FPrime(j))
    }
    pub fn t_prime(j: u32) -> Self {
        Self::new(Role::TPrime(j))
    }
    pub fn hub_l(level: HubLevel) -> Self {
        Self::new(Role::HubL(level))
    }
    pub fn hub_r(level: HubLevel) -> Self {
        Self::new(Role::HubR(level))
    }
    pub fn x(m: u8) -> Self {
        Self::new(Role::X(m))
    }

    /// Path node `step` hops from the canonically smaller endpoint.
    ///
    /// `from` and `to` may be given in either order; `step_from_first` counts
    /// from `from`. The stored form always starts at the smaller endpoint.
    pub fn path_node(from: &NodeLabel, to: &NodeLabel, lane: Lane, step_from_first: u32, len: u32) -> Self {
        let (a, b, step) = if from <= to {
            (from.clone(), to.clone(), step_from_first)
        } else {
            (to.clone(), from.clone(), len - step_from_first)
        };
        Self::new(Role::PathNode {
            a: Box::new(a),
            b: Box::new(b),
            lane,
            step,
        })
    }

    pub fn tree_node(root: &NodeLabel, tree: u32, position: u32) -> Self {
        Self::new(Role::TreeNode {
            root: Box::new(root.clone()),
            tree,
            position,
        })
    }

    pub fn is_path_node(&self) -> bool {
        matches!(self.role, Role::PathNode { .. })
    }

    /// True for nodes that exist in the unstretched base construction.
    pub fn is_structural(&self) -> bool {
        !matches!(self.role, Role::PathNode { .. } | Role::TreeNode { .. })
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.role {
            Role::L(i) => write!(f, "l{i}")?,
            Role::R(i) => write!(f, "r{i}")?,
            Role::LPrime(i) => write!(f, "l'{i}")?,
            Role::RPrime(i) => write!(f, "r'{i}")?,
            Role::F(j) => write!(f, "f{j}")?,
            Role::T(j) => write!(f, "t{j}")?,
            Role::FPrime(j) => write!(f, "f'{j}")?,
            Role::TPrime(j) => write!(f, "t'{j}")?,
            Role::HubL(level) => write!(f, "l{}", level.suffix())?,
            Role::HubR(level) => write!(f, "r{}", level.suffix())?,
            Role::HubLSplit(j) => write!(f, "lk+1^{j}")?,
            Role::HubRSplit(j) => write!(f, "rk+1^{j}")?,
            Role::A => write!(f, "a")?,
            Role::B => write!(f, "b")?,
            Role::X(m) => write!(f, "x{m}")?,
            Role::PathNode { a, b, lane, step } => {
                let tag = match lane {
                    Lane::Structural => "y",
                    Lane::Input => "yi",
                };
                write!(f, "{tag}({a},{b},{step})")?
            }
            Role::TreeNode {
                root,
                tree,
                position,
            } => write!(f, "tr({root},{tree},{position})")?,
            Role::CliquePad(i) => write!(f, "pad{i}")?,
        }
        match self.copy {
            CopyTag::None => Ok(()),
            CopyTag::Copy1 => write!(f, "@1"),
            CopyTag::Copy2 => write!(f, "@2"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid node label {input:?} at byte {at}: {reason}")]
pub struct LabelParseError {
    pub input: String,
    pub at: usize,
    pub reason: &'static str,
}

impl FromStr for NodeLabel {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let label = p.label()?;
        if p.pos != s.len() {
            return Err(p.fail("trailing characters"));
        }
        Ok(label)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn fail(&self, reason: &'static str) -> LabelParseError {
        LabelParseError {
            input: self.src.to_string(),
            at: self.pos,
            reason,
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str, reason: &'static str) -> Result<(), LabelParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.fail(reason))
        }
    }

    fn number(&mut self) -> Result<u32, LabelParseError> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.fail("expected a number"));
        }
        let n = self.rest()[..digits]
            .parse()
            .map_err(|_| self.fail("number out of range"))?;
        self.pos += digits;
        Ok(n)
    }

    fn label(&mut self) -> Result<NodeLabel, LabelParseError> {
        let role = self.role()?;
        let copy = if self.eat("@1") {
            CopyTag::Copy1
        } else if self.eat("@2") {
            CopyTag::Copy2
        } else {
            CopyTag::None
        };
        Ok(NodeLabel { role, copy })
    }

    fn hub(&mut self, left: bool) -> Result<Role, LabelParseError> {
        // Already consumed "lk" / "rk".
        if self.eat("+1^") {
            let j = self.number()?;
            return Ok(if left { Role::HubLSplit(j) } else { Role::HubRSplit(j) });
        }
        let level = if self.eat("+1") {
            HubLevel::K1
        } else if self.eat("+2") {
            HubLevel::K2
        } else {
            HubLevel::K
        };
        Ok(if left { Role::HubL(level) } else { Role::HubR(level) })
    }

    fn role(&mut self) -> Result<Role, LabelParseError> {
        if self.eat("yi(") {
            return self.path_body(Lane::Input);
        }
        if self.eat("y(") {
            return self.path_body(Lane::Structural);
        }
        if self.eat("tr(") {
            let root = self.label()?;
            self.expect(",", "expected ','")?;
            let tree = self.number()?;
            self.expect(",", "expected ','")?;
            let position = self.number()?;
            self.expect(")", "expected ')'")?;
            return Ok(Role::TreeNode {
                root: Box::new(root),
                tree,
                position,
            });
        }
        if self.eat("pad") {
            return Ok(Role::CliquePad(self.number()?));
        }
        if self.eat("lk") {
            return self.hub(true);
        }
        if self.eat("rk") {
            return self.hub(false);
        }
        let primed = |p: &mut Self, plain: fn(u32) -> Role, prime: fn(u32) -> Role| {
            if p.eat("'") {
                p.number().map(prime)
            } else {
                p.number().map(plain)
            }
        };
        if self.eat("l") {
            return primed(self, Role::L, Role::LPrime);
        }
        if self.eat("r") {
            return primed(self, Role::R, Role::RPrime);
        }
        if self.eat("f") {
            return primed(self, Role::F, Role::FPrime);
        }
        if self.eat("t") {
            return primed(self, Role::T, Role::TPrime);
        }
        if self.eat("x") {
            let m = self.number()?;
            return u8::try_from(m)
                .map(Role::X)
                .map_err(|_| self.fail("x index out of range"));
        }
        if self.eat("a") {
            return Ok(Role::A);
        }
        if self.eat("b") {
            return Ok(Role::B);
        }
        Err(self.fail("unknown role"))
    }

    fn path_body(&mut self, lane: Lane) -> Result<Role, LabelParseError> {
        let a = self.label()?;
        self.expect(",", "expected ','")?;
        let b = self.label()?;
        self.expect(",", "expected ','")?;
        let step = self.number()?;
        self.expect(")", "expected ')'")?;
        if a.is_path_node() || b.is_path_node() {
            return Err(self.fail("path endpoints must not be path nodes"));
        }
        Ok(Role::PathNode {
            a: Box::new(a),
            b: Box::new(b),
            lane,
            step,
        })
    }
}
