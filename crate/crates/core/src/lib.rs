//! Lower-bound graph families for distance problems in the CONGEST model.
//!
//! The crate builds the instances, checks their distance, degree and cut
//! facts against an exact oracle, simulates CONGEST(b) programs, and runs the
//! two-party Set-Disjointness simulation over the communication cut.

pub mod checks;
pub mod distance;
pub mod gadgets;
pub mod graph;
pub mod io;
pub mod label;
pub mod reduction;
pub mod scalar;
pub mod sim;
pub mod spanner;

pub use graph::{Graph, GraphBuilder, GraphError, NodeId, EdgeId, Owner};
pub use label::NodeLabel;
pub use scalar::{Rational, Weight};

/// Unweighted or small-weight graphs.
pub type Graph32 = Graph<u32>;
/// Graphs with large weights.
pub type Graph64 = Graph<u64>;
