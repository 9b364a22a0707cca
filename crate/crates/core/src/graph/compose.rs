use thiserror::Error;

use crate::monoid::{FlowValue, MonoidError};

use super::{EdgeMap, FlowGraph, GraphError, InflowMap, NodeId, NodeSet};

/// Why `h1 * h2` is undefined, or why it could not be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("node {0} belongs to both graphs")]
    NodesOverlap(NodeId),
    #[error("boundary ({src}, {dst}): outflow {expected} but inflow {actual}")]
    BoundaryMismatch {
        src: NodeId,
        dst: NodeId,
        expected: FlowValue,
        actual: FlowValue,
    },
    #[error("flow of node {node} vanishes: {before} in its component, {after} in the composition")]
    VanishingFlow {
        node: NodeId,
        before: FlowValue,
        after: FlowValue,
    },
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ComposeError {
    /// True when the composition is undefined, as opposed to an evaluation
    /// failure of one of the graphs.
    pub fn is_undefined(&self) -> bool {
        matches!(
            self,
            ComposeError::NodesOverlap(_)
                | ComposeError::BoundaryMismatch { .. }
                | ComposeError::VanishingFlow { .. }
        )
    }
}

/// `h1 * h2`, checked in three stages: disjointness and boundary agreement
/// (`##`), the auxiliary union `⊎`, and flow preservation (`#`).
pub(crate) fn compose(h1: &FlowGraph, h2: &FlowGraph) -> Result<FlowGraph, ComposeError> {
    // h∅ is a unit for every tag
    if h2.is_empty() {
        return Ok(h1.clone());
    }
    if h1.is_empty() {
        return Ok(h2.clone());
    }
    if h1.tag != h2.tag {
        return Err(MonoidError::TagMismatch {
            left: h1.tag,
            right: h2.tag,
        }
        .into());
    }
    if let Some(&x) = h1.nodes.intersection(&h2.nodes).next() {
        return Err(ComposeError::NodesOverlap(x));
    }
    check_boundary(h1, h2)?;
    check_boundary(h2, h1)?;

    let nodes: NodeSet = h1.nodes.union(&h2.nodes).copied().collect();
    let edges: EdgeMap = h1
        .edges
        .iter()
        .chain(h2.edges.iter())
        .map(|(k, f)| (*k, f.clone()))
        .collect();
    let inflow: InflowMap = h1
        .inflow
        .iter()
        .chain(h2.inflow.iter())
        .filter(|((src, _), _)| !nodes.contains(src))
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    let composed = FlowGraph::from_parts(h1.tag, nodes, edges, inflow);

    let joint = composed.flow()?;
    for part in [h1, h2] {
        for (x, before) in part.flow()? {
            let after = &joint[x];
            if after != before {
                return Err(ComposeError::VanishingFlow {
                    node: *x,
                    before: before.clone(),
                    after: after.clone(),
                });
            }
        }
    }
    Ok(composed)
}

/// Every boundary edge from `from` into `to` must deliver exactly the inflow
/// `to` expects from it, and vice versa.
fn check_boundary(from: &FlowGraph, to: &FlowGraph) -> Result<(), ComposeError> {
    let out = from.outflow()?;
    let sent = out.iter().filter(|((_, dst), _)| to.nodes.contains(dst));
    let expected = to.inflow.iter().filter(|((src, _), _)| from.nodes.contains(src));
    let zero = FlowValue::zero(from.tag);
    let mut keys: Vec<(NodeId, NodeId)> = sent.map(|(k, _)| *k).chain(expected.map(|(k, _)| *k)).collect();
    keys.sort();
    keys.dedup();
    for (src, dst) in keys {
        let o = out.get(&(src, dst)).unwrap_or(&zero);
        let i = to.inflow.get(&(src, dst)).unwrap_or(&zero);
        if o != i {
            return Err(ComposeError::BoundaryMismatch {
                src,
                dst,
                expected: o.clone(),
                actual: i.clone(),
            });
        }
    }
    Ok(())
}
