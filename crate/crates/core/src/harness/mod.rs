//! Benchmark instances: serialization, generators, and timing.

mod bench;
mod format;
mod lists;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::footprint::Mismatch;
use crate::graph::{FlowGraph, NodeId};
use crate::monoid::MonoidTag;

pub use bench::{run_bench, time_footprint, write_csv, BenchRow, BenchStatus, BenchTotals};
pub use format::{
    parse_composition, parse_instance, serialize_composition, serialize_graph, serialize_instance,
    CompositionCase, CompositionDoc,
};
pub use lists::{
    cyclic_suite, gen_cyclic_update, gen_list_update, list_graph, list_suite, ListNodeSpec, ListOp,
    LIST_SOURCE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("{}{reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Parse { line: Option<usize>, reason: String },
    #[error("not a valid update: {0}")]
    PreconditionViolation(Mismatch),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// A pair of graphs over the same nodes and inflow, `before` updated to
/// `after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub label: String,
    pub before: FlowGraph,
    pub after: FlowGraph,
    /// Display names for node ids; optional.
    pub names: BTreeMap<NodeId, String>,
}

impl Instance {
    pub fn new(
        label: impl Into<String>,
        before: FlowGraph,
        after: FlowGraph,
    ) -> Result<Instance, HarnessError> {
        let mismatch = if before.tag() != after.tag() {
            Some(Mismatch::Monoid)
        } else if before.nodes() != after.nodes() {
            Some(Mismatch::Nodes)
        } else if before.inflow() != after.inflow() {
            Some(Mismatch::Inflow)
        } else {
            None
        };
        if let Some(m) = mismatch {
            return Err(HarnessError::PreconditionViolation(m));
        }
        Ok(Instance {
            label: label.into(),
            before,
            after,
            names: BTreeMap::new(),
        })
    }

    pub fn with_names(mut self, names: BTreeMap<NodeId, String>) -> Instance {
        self.names = names;
        self
    }

    pub fn tag(&self) -> MonoidTag {
        self.before.tag()
    }

    /// The display name of `x`, or its id.
    pub fn name(&self, x: NodeId) -> String {
        self.names.get(&x).cloned().unwrap_or_else(|| x.to_string())
    }
}

#[cfg(test)]
mod tests;
