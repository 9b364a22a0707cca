//! Flow graphs `h = (X, E, in)` and their least-fixed-point flows.
//!
//! Graphs are immutable. Every edge map and inflow map is kept sparse: an
//! absent edge is the zero function and an absent inflow entry is `0`, and no
//! stored entry ever equals those defaults, so structural equality is
//! semantic equality.

mod compose;
mod fixpoint;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{EdgeFn, FlowValue, MonoidError, MonoidTag};

pub use compose::ComposeError;
pub(crate) use fixpoint::Dense;
pub use fixpoint::FixpointOptions;

/// A node identity. Ids are global: an id outside a graph's node set denotes
/// an external node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

pub type NodeSet = BTreeSet<NodeId>;
/// `(source, target) ↦ edge function`; sources lie inside the graph.
pub type EdgeMap = BTreeMap<(NodeId, NodeId), EdgeFn>;
/// `(external source, target) ↦ value`.
pub type InflowMap = BTreeMap<(NodeId, NodeId), FlowValue>;
/// `node ↦ flow value` for every node of a graph.
pub type Flow = BTreeMap<NodeId, FlowValue>;
/// `(inside node, outside node) ↦ value`, zero entries omitted.
pub type Outflow = BTreeMap<(NodeId, NodeId), FlowValue>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({src}, {dst}) starts outside the node set")]
    EdgeSourceOutside { src: NodeId, dst: NodeId },
    #[error("inflow ({src}, {dst}) comes from a node inside the graph")]
    InflowSourceInside { src: NodeId, dst: NodeId },
    #[error("inflow ({src}, {dst}) targets a node outside the graph")]
    InflowTargetOutside { src: NodeId, dst: NodeId },
    #[error("node {0} is not in the graph")]
    NodeOutside(NodeId),
    #[error("flow did not stabilize within {cap} updates per node")]
    NonTermination { cap: usize },
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// A flow graph over one of the built-in monoids.
#[derive(Clone)]
pub struct FlowGraph {
    tag: MonoidTag,
    nodes: NodeSet,
    edges: EdgeMap,
    inflow: InflowMap,
    flow: OnceLock<Result<Flow, GraphError>>,
}

impl FlowGraph {
    /// Validates and canonicalizes a flow graph. Zero edges and zero inflow
    /// entries are dropped.
    pub fn new(
        tag: MonoidTag,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = ((NodeId, NodeId), EdgeFn)>,
        inflow: impl IntoIterator<Item = ((NodeId, NodeId), FlowValue)>,
    ) -> Result<FlowGraph, GraphError> {
        let nodes: NodeSet = nodes.into_iter().collect();
        let mut edge_map = EdgeMap::new();
        for ((src, dst), f) in edges {
            if f.tag() != tag {
                return Err(MonoidError::TagMismatch {
                    left: tag,
                    right: f.tag(),
                }
                .into());
            }
            if !nodes.contains(&src) {
                return Err(GraphError::EdgeSourceOutside { src, dst });
            }
            if f.is_zero() {
                edge_map.remove(&(src, dst));
            } else {
                edge_map.insert((src, dst), f);
            }
        }
        let inflow = validate_inflow(tag, &nodes, inflow)?;
        Ok(FlowGraph::from_parts(tag, nodes, edge_map, inflow))
    }

    /// The unit of composition, `h∅ = (∅, ∅, ∅)`.
    pub fn empty(tag: MonoidTag) -> FlowGraph {
        FlowGraph::from_parts(tag, NodeSet::new(), EdgeMap::new(), InflowMap::new())
    }

    /// Assembles a graph from parts already known to be valid and sparse.
    pub(crate) fn from_parts(tag: MonoidTag, nodes: NodeSet, edges: EdgeMap, inflow: InflowMap) -> FlowGraph {
        debug_assert!(edges.values().all(|f| !f.is_zero()));
        debug_assert!(inflow.values().all(|v| !v.is_zero()));
        FlowGraph {
            tag,
            nodes,
            edges,
            inflow,
            flow: OnceLock::new(),
        }
    }

    pub fn tag(&self) -> MonoidTag {
        self.tag
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn edges(&self) -> &EdgeMap {
        &self.edges
    }

    pub fn inflow(&self) -> &InflowMap {
        &self.inflow
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, x: NodeId) -> bool {
        self.nodes.contains(&x)
    }

    /// The edge function on `(src, dst)`, zero when absent.
    pub fn edge(&self, src: NodeId, dst: NodeId) -> EdgeFn {
        self.edges
            .get(&(src, dst))
            .cloned()
            .unwrap_or_else(|| EdgeFn::zero(self.tag))
    }

    /// Nonzero edges leaving `src`, in target order.
    pub fn out_edges(&self, src: NodeId) -> impl Iterator<Item = (NodeId, &EdgeFn)> + '_ {
        self.edges
            .range((src, NodeId(0))..=(src, NodeId(u32::MAX)))
            .map(|(&(_, dst), f)| (dst, f))
    }

    /// Nonzero edges from inside the graph to outside nodes.
    pub fn exits(&self) -> impl Iterator<Item = ((NodeId, NodeId), &EdgeFn)> + '_ {
        self.edges
            .iter()
            .filter(|((_, dst), _)| !self.nodes.contains(dst))
            .map(|(&k, f)| (k, f))
    }

    /// `in_x`, the sum of all inflow entries targeting `x`.
    pub fn inflow_at(&self, x: NodeId) -> Result<FlowValue, GraphError> {
        if !self.contains(x) {
            return Err(GraphError::NodeOutside(x));
        }
        Ok(inflow_at(self.tag, &self.inflow, x)?)
    }

    /// Whether the subgraph of nonzero edges between graph nodes is acyclic.
    pub fn is_acyclic(&self) -> bool {
        Dense::new(&self.nodes, &self.edges).is_acyclic()
    }

    /// The least flow, computed once and cached.
    pub fn flow(&self) -> Result<&Flow, GraphError> {
        self.flow
            .get_or_init(|| {
                fixpoint::solve(
                    self.tag,
                    &self.nodes,
                    &self.edges,
                    &self.inflow,
                    FixpointOptions::default(),
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Flow of a single node.
    pub fn flow_at(&self, x: NodeId) -> Result<FlowValue, GraphError> {
        self.flow()?.get(&x).cloned().ok_or(GraphError::NodeOutside(x))
    }

    /// Computes the least flow under an explicit inflow and solver options,
    /// bypassing the cache.
    pub fn compute_flow_with(&self, inflow: &InflowMap, opts: FixpointOptions) -> Result<Flow, GraphError> {
        fixpoint::solve(self.tag, &self.nodes, &self.edges, inflow, opts)
    }

    /// `out(x, y) = E(x,y)(flow(x))` for every boundary edge.
    pub fn outflow(&self) -> Result<Outflow, GraphError> {
        let flow = self.flow()?;
        self.outflow_of(flow)
    }

    fn outflow_of(&self, flow: &Flow) -> Result<Outflow, GraphError> {
        let mut out = Outflow::new();
        for ((src, dst), f) in self.exits() {
            let v = f.apply(&flow[&src])?;
            if !v.is_zero() {
                out.insert((src, dst), v);
            }
        }
        Ok(out)
    }

    /// The transfer function applied to `inflow`: the outflow of this graph
    /// with its inflow replaced. `self` is unchanged.
    pub fn transfer(&self, inflow: &InflowMap) -> Result<Outflow, GraphError> {
        let inflow = validate_inflow(self.tag, &self.nodes, inflow.clone())?;
        let flow = fixpoint::solve(
            self.tag,
            &self.nodes,
            &self.edges,
            &inflow,
            FixpointOptions::default(),
        )?;
        self.outflow_of(&flow)
    }

    /// The same nodes and edges with a different inflow.
    pub fn with_inflow(&self, inflow: InflowMap) -> Result<FlowGraph, GraphError> {
        let inflow = validate_inflow(self.tag, &self.nodes, inflow)?;
        Ok(FlowGraph::from_parts(
            self.tag,
            self.nodes.clone(),
            self.edges.clone(),
            inflow,
        ))
    }

    /// `h|Y`: keeps the nodes of `Y`, their outgoing edges, the external
    /// inflow into them, and turns the flow arriving from dropped nodes into
    /// inflow.
    pub fn restrict(&self, keep: &NodeSet) -> Result<FlowGraph, GraphError> {
        let nodes: NodeSet = self.nodes.intersection(keep).copied().collect();
        let edges: EdgeMap = self
            .edges
            .iter()
            .filter(|((src, _), _)| nodes.contains(src))
            .map(|(k, f)| (*k, f.clone()))
            .collect();
        let mut inflow: InflowMap = self
            .inflow
            .iter()
            .filter(|((_, dst), _)| nodes.contains(dst))
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        if nodes.len() < self.nodes.len() {
            let flow = self.flow()?;
            for (&(src, dst), f) in &self.edges {
                if nodes.contains(&dst) && !nodes.contains(&src) {
                    let v = f.apply(&flow[&src])?;
                    if !v.is_zero() {
                        inflow.insert((src, dst), v);
                    }
                }
            }
        }
        Ok(FlowGraph::from_parts(self.tag, nodes, edges, inflow))
    }

    /// Composition `self * other`; see [`compose::compose`].
    pub fn compose(&self, other: &FlowGraph) -> Result<FlowGraph, ComposeError> {
        compose::compose(self, other)
    }
}

/// Structural equality: tag, nodes, edges, and inflow.
impl PartialEq for FlowGraph {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.inflow == other.inflow
    }
}

impl Eq for FlowGraph {}

impl fmt::Debug for FlowGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowGraph")
            .field("tag", &self.tag)
            .field("nodes", &self.nodes)
            .field("edges", &self.edges)
            .field("inflow", &self.inflow)
            .finish()
    }
}

impl fmt::Display for FlowGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} graph on {{", self.tag)?;
        for (i, x) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")?;
        for ((s, d), e) in &self.edges {
            write!(f, "\n  {s} -> {d}: {e}")?;
        }
        for ((s, d), v) in &self.inflow {
            write!(f, "\n  {s} => {d}: {v}")?;
        }
        Ok(())
    }
}

pub(crate) fn inflow_at(tag: MonoidTag, inflow: &InflowMap, x: NodeId) -> Result<FlowValue, MonoidError> {
    FlowValue::sum(
        tag,
        inflow.iter().filter(|((_, dst), _)| *dst == x).map(|(_, v)| v),
    )
}

fn validate_inflow(
    tag: MonoidTag,
    nodes: &NodeSet,
    inflow: impl IntoIterator<Item = ((NodeId, NodeId), FlowValue)>,
) -> Result<InflowMap, GraphError> {
    let mut map = InflowMap::new();
    for ((src, dst), v) in inflow {
        v.check_tag(tag)?;
        if nodes.contains(&src) {
            return Err(GraphError::InflowSourceInside { src, dst });
        }
        if !nodes.contains(&dst) {
            return Err(GraphError::InflowTargetOutside { src, dst });
        }
        if v.is_zero() {
            map.remove(&(src, dst));
        } else {
            map.insert((src, dst), v);
        }
    }
    Ok(map)
}

/// Collects nodes from raw ids.
pub fn node_set<I, T>(ids: I) -> NodeSet
where
    I: IntoIterator<Item = T>,
    T: Into<NodeId>,
{
    ids.into_iter().map(Into::into).collect()
}
