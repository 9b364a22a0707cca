//! Flow graphs over flow monoids, their least-fixed-point flows, and the
//! inference of flow footprints for graph updates.
//!
//! The usual entry point is [`compute_footprint`] on a pair of graphs over
//! the same nodes and inflow; [`oracle`] decides the same questions by brute
//! force for testing.

pub mod footprint;
pub mod graph;
pub mod harness;
pub mod monoid;
pub mod oracle;
pub mod paths;
pub mod random;

#[cfg(test)]
mod testing;

pub use footprint::{
    compute_footprint, verify_footprint, Footprint, FootprintError, FootprintResult, MethodTag, VerifyMode,
};
pub use graph::{ComposeError, FlowGraph, GraphError, NodeId, NodeSet};
pub use harness::Instance;
pub use monoid::{EdgeFn, ExtInt, ExtNat, FlowValue, KeySet, MonoidTag};
pub use oracle::EnumBudget;
