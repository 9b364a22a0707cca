//! Random flow graphs and graph pairs for randomized law checking.
//!
//! Internal nodes are numbered from 1. External sources use ids from
//! [`SOURCE_BASE`] and external sinks ids from [`SINK_BASE`], so graphs drawn
//! independently share an id space and can be composed. Keys stay in a small
//! range so the inflow oracle remains cheap.

use rand::{Rng, RngExt};

use crate::graph::{EdgeMap, FlowGraph, InflowMap, NodeId, NodeSet};
use crate::monoid::{EdgeFn, ExtInt, ExtNat, FlowValue, KeySet, MonoidTag};

pub const SOURCE_BASE: u32 = 100;
pub const SINK_BASE: u32 = 200;
/// Keys used by random keyset values, inclusive.
pub const KEY_RANGE: (i64, i64) = (0, 6);

/// Parameters of [`random_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Only edges from smaller to larger ids.
    pub acyclic: bool,
    pub edge_prob: f64,
    pub exit_prob: f64,
    pub inflow_prob: f64,
    pub sources: u32,
    pub sinks: u32,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            min_nodes: 1,
            max_nodes: 6,
            acyclic: false,
            edge_prob: 0.35,
            exit_prob: 0.3,
            inflow_prob: 0.4,
            sources: 2,
            sinks: 2,
        }
    }
}

impl Shape {
    pub fn acyclic(self) -> Shape {
        Shape {
            acyclic: true,
            ..self
        }
    }

    pub fn nodes(self, min: usize, max: usize) -> Shape {
        Shape {
            min_nodes: min,
            max_nodes: max,
            ..self
        }
    }
}

fn key<R: Rng + ?Sized>(rng: &mut R) -> i64 {
    rng.random_range(KEY_RANGE.0..=KEY_RANGE.1)
}

pub fn random_keyset<R: Rng + ?Sized>(rng: &mut R) -> KeySet {
    match rng.random_range(0..8) {
        0 => KeySet::empty(),
        1 => KeySet::integers(),
        2 => KeySet::above(ExtInt::Fin(key(rng) - 1)),
        3 | 4 => {
            let (a, b) = (key(rng), key(rng));
            KeySet::interval(ExtInt::Fin(a.min(b)), ExtInt::Fin(a.max(b)))
        }
        _ => KeySet::from_points((0..rng.random_range(1..4)).map(|_| ExtInt::Fin(key(rng)))),
    }
}

fn small_nat<R: Rng + ?Sized>(rng: &mut R, max: u64, inf_prob: f64) -> ExtNat {
    if rng.random_bool(inf_prob) {
        ExtNat::Inf
    } else {
        ExtNat::Fin(rng.random_range(0..=max))
    }
}

pub fn random_value<R: Rng + ?Sized>(tag: MonoidTag, rng: &mut R) -> FlowValue {
    match tag {
        MonoidTag::Counting => FlowValue::Counting(small_nat(rng, 3, 0.05)),
        MonoidTag::Keyset => FlowValue::Keyset(random_keyset(rng)),
        MonoidTag::MaxCap => FlowValue::MaxCap(small_nat(rng, 6, 0.1)),
    }
}

pub fn random_fn<R: Rng + ?Sized>(tag: MonoidTag, rng: &mut R) -> EdgeFn {
    match tag {
        MonoidTag::Counting => EdgeFn::Scale(ExtNat::Fin(rng.random_range(0..=2))),
        MonoidTag::Keyset => match rng.random_range(0..4) {
            0 => EdgeFn::identity(tag),
            1 => EdgeFn::keyset_lambda(ExtInt::Fin(key(rng) - 1)),
            _ => EdgeFn::Intersect(random_keyset(rng)),
        },
        MonoidTag::MaxCap => EdgeFn::Cap(small_nat(rng, 6, 0.3)),
    }
}

fn sources(shape: &Shape) -> impl Iterator<Item = NodeId> {
    (0..shape.sources).map(|i| NodeId(SOURCE_BASE + i))
}

fn sinks(shape: &Shape) -> impl Iterator<Item = NodeId> {
    (0..shape.sinks).map(|i| NodeId(SINK_BASE + i))
}

/// A random graph on nodes `1..=n`.
pub fn random_graph<R: Rng + ?Sized>(tag: MonoidTag, shape: &Shape, rng: &mut R) -> FlowGraph {
    let n = rng.random_range(shape.min_nodes..=shape.max_nodes) as u32;
    let nodes: Vec<NodeId> = (1..=n).map(NodeId).collect();
    let mut edges = EdgeMap::new();
    for &x in &nodes {
        for &y in &nodes {
            if shape.acyclic && y <= x {
                continue;
            }
            if rng.random_bool(shape.edge_prob) {
                edges.insert((x, y), random_fn(tag, rng));
            }
        }
        for z in sinks(shape) {
            if rng.random_bool(shape.exit_prob) {
                edges.insert((x, z), random_fn(tag, rng));
            }
        }
    }
    let mut inflow = InflowMap::new();
    for s in sources(shape) {
        for &x in &nodes {
            if rng.random_bool(shape.inflow_prob) {
                inflow.insert((s, x), random_value(tag, rng));
            }
        }
    }
    FlowGraph::new(tag, nodes, edges, inflow).expect("generated graph is well formed")
}

/// A uniformly random subset.
pub fn random_subset<R: Rng + ?Sized>(nodes: &NodeSet, rng: &mut R) -> NodeSet {
    nodes.iter().copied().filter(|_| rng.random_bool(0.5)).collect()
}

/// Splits `nodes` into `k` random, possibly empty, blocks.
pub fn random_partition<R: Rng + ?Sized>(nodes: &NodeSet, k: usize, rng: &mut R) -> Vec<NodeSet> {
    let mut blocks = vec![NodeSet::new(); k];
    for &x in nodes {
        blocks[rng.random_range(0..k)].insert(x);
    }
    blocks
}

/// `h` with the outgoing edges of one to two nodes redrawn. Nodes and inflow
/// are unchanged, so the pair satisfies the footprint preconditions.
pub fn mutate<R: Rng + ?Sized>(h: &FlowGraph, shape: &Shape, rng: &mut R) -> FlowGraph {
    let tag = h.tag();
    let nodes: Vec<NodeId> = h.nodes().iter().copied().collect();
    let mut edges = h.edges().clone();
    if nodes.is_empty() {
        return h.clone();
    }
    for _ in 0..rng.random_range(1..=2) {
        let x = nodes[rng.random_range(0..nodes.len())];
        if rng.random_bool(0.5) {
            // tweak the functions but keep the targets
            let targets: Vec<NodeId> = h.out_edges(x).map(|(y, _)| y).collect();
            for y in targets {
                if rng.random_bool(0.6) {
                    edges.insert((x, y), random_fn(tag, rng));
                }
            }
        } else {
            edges.retain(|(src, _), _| *src != x);
            for &y in &nodes {
                if shape.acyclic && y <= x {
                    continue;
                }
                if rng.random_bool(shape.edge_prob) {
                    edges.insert((x, y), random_fn(tag, rng));
                }
            }
            for z in sinks(shape) {
                if rng.random_bool(shape.exit_prob) {
                    edges.insert((x, z), random_fn(tag, rng));
                }
            }
        }
    }
    edges.retain(|_, f| !f.is_zero());
    FlowGraph::new(tag, nodes, edges, h.inflow().clone()).expect("mutation keeps the graph well formed")
}

/// Three graphs whose composition is defined: the restrictions of one random
/// graph to the blocks of a random partition.
pub fn random_compatible_triple<R: Rng + ?Sized>(
    tag: MonoidTag,
    shape: &Shape,
    rng: &mut R,
) -> Option<[FlowGraph; 3]> {
    let h = random_graph(tag, shape, rng);
    let blocks = random_partition(h.nodes(), 3, rng);
    let parts: Vec<FlowGraph> = blocks
        .iter()
        .map(|b| h.restrict(b))
        .collect::<Result<_, _>>()
        .ok()?;
    parts.try_into().ok()
}
