//! Paths through flow graphs and the path-algebra view of transfer functions.
//!
//! With distributive edge functions the transfer function of a graph is a sum
//! over paths: the outflow on exit `(y, z)` is `Σ_x Σ_p E_p(in_x)` where `p`
//! ranges over the paths from `x` leaving through `(y, z)`. On acyclic graphs
//! that set is finite. With decreasing functions and idempotent addition,
//! paths that repeat a node are dominated by the path with the cycle cut out,
//! so simple paths suffice even on cyclic graphs.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{Dense, FlowGraph, GraphError, InflowMap, NodeId, NodeSet, Outflow};
use crate::monoid::{EdgeFn, FlowValue, MonoidError, MonoidTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("{0} is not a path of the graph")]
    NotAPath(Path),
    #[error("({0}, {1}) is not a boundary edge of the graph")]
    ExitNotBoundary(NodeId, NodeId),
    #[error("node {0} is not in the graph")]
    NodeOutside(NodeId),
    #[error("the graph has a cycle; all-path sums are unbounded")]
    CyclicGraph,
    #[error("simple paths on a cyclic graph need idempotent addition")]
    RequiresIdempotent,
    #[error("simple paths on a cyclic graph need decreasing edge functions")]
    RequiresDecreasing,
    #[error("the graphs have different node sets")]
    NodeSetMismatch,
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A path `x0 · … · xn · z`: graph nodes followed by one external node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<NodeId>);

impl Path {
    /// Wraps a node sequence. At least two nodes are required.
    pub fn new(nodes: Vec<NodeId>) -> Option<Path> {
        (nodes.len() >= 2).then_some(Path(nodes))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn first(&self) -> NodeId {
        self.0[0]
    }

    /// The last node inside the graph.
    pub fn last(&self) -> NodeId {
        self.0[self.0.len() - 2]
    }

    /// The exit edge `(last, z)`.
    pub fn exit(&self) -> (NodeId, NodeId) {
        (self.last(), self.0[self.0.len() - 1])
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_simple(&self) -> bool {
        let mut seen: Vec<NodeId> = self.0.clone();
        seen.sort();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Result of a bounded path enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    pub paths: Vec<Path>,
    /// Some path was cut at the length bound; `paths` is then incomplete.
    pub truncated: bool,
}

/// Which path set a summary sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// Every path; requires an acyclic graph.
    All,
    /// Node-repetition-free paths.
    Simple,
}

/// `(source, exit) ↦ Σ_p E_p` for the paths from `source` leaving through
/// `exit`. Missing entries are the zero function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSummary {
    entries: BTreeMap<(NodeId, (NodeId, NodeId)), EdgeFn>,
}

impl SourceSummary {
    pub fn get(&self, source: NodeId, exit: (NodeId, NodeId)) -> Option<&EdgeFn> {
        self.entries.get(&(source, exit))
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, (NodeId, NodeId), &EdgeFn)> {
        self.entries.iter().map(|(&(s, e), f)| (s, e, f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every exit that appears with some source.
    pub fn exits(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.entries.keys().map(|(_, e)| *e)
    }

    pub(crate) fn add(
        &mut self,
        source: NodeId,
        exit: (NodeId, NodeId),
        f: EdgeFn,
    ) -> Result<(), MonoidError> {
        use std::collections::btree_map::Entry;
        match self.entries.entry((source, exit)) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().sum(&f)?;
                *o.get_mut() = sum;
            }
        }
        Ok(())
    }

    /// `out(y, z) = Σ_x summary(x, (y, z))(in_x)`, zero entries dropped.
    pub fn apply(&self, inflow: &BTreeMap<NodeId, FlowValue>) -> Result<Outflow, MonoidError> {
        let mut out = Outflow::new();
        for (&(source, exit), f) in &self.entries {
            let Some(m) = inflow.get(&source) else { continue };
            let v = f.apply(m)?;
            if v.is_zero() {
                continue;
            }
            let slot = out.entry(exit).or_insert_with(|| FlowValue::zero(v.tag()));
            *slot = slot.add(&v)?;
        }
        Ok(out)
    }
}

/// `E_p`: the edge functions along `p` composed, first edge applied first.
pub fn path_fn(h: &FlowGraph, p: &Path) -> Result<EdgeFn, PathError> {
    let nodes = p.nodes();
    let inside_ok = nodes[..nodes.len() - 1].iter().all(|n| h.contains(*n));
    if !inside_ok || h.contains(nodes[nodes.len() - 1]) {
        return Err(PathError::NotAPath(p.clone()));
    }
    let mut acc = EdgeFn::identity(h.tag());
    for w in nodes.windows(2) {
        let f = h
            .edges()
            .get(&(w[0], w[1]))
            .ok_or_else(|| PathError::NotAPath(p.clone()))?;
        acc = acc.then(f)?;
    }
    Ok(acc)
}

fn check_exit(h: &FlowGraph, x: NodeId, exit: (NodeId, NodeId)) -> Result<(), PathError> {
    if !h.contains(x) {
        return Err(PathError::NodeOutside(x));
    }
    let (y, z) = exit;
    if !h.contains(y) || h.contains(z) || !h.edges().contains_key(&exit) {
        return Err(PathError::ExitNotBoundary(y, z));
    }
    Ok(())
}

/// All paths from `x` leaving through `exit` with at most `max_len` edges,
/// shortest first. Complete unless `truncated` is set.
pub fn enum_paths(
    h: &FlowGraph,
    x: NodeId,
    exit: (NodeId, NodeId),
    max_len: usize,
) -> Result<PathSet, PathError> {
    check_exit(h, x, exit)?;
    let mut out = PathSet {
        paths: Vec::new(),
        truncated: false,
    };
    let mut trail = vec![x];
    walk_paths(h, exit, max_len, false, &mut trail, &mut out);
    out.paths
        .sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// All simple paths from `x` leaving through `exit`.
pub fn enum_simple_paths(h: &FlowGraph, x: NodeId, exit: (NodeId, NodeId)) -> Result<Vec<Path>, PathError> {
    check_exit(h, x, exit)?;
    let mut out = PathSet {
        paths: Vec::new(),
        truncated: false,
    };
    let mut trail = vec![x];
    walk_paths(h, exit, usize::MAX, true, &mut trail, &mut out);
    out.paths
        .sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out.paths)
}

fn walk_paths(
    h: &FlowGraph,
    exit: (NodeId, NodeId),
    max_len: usize,
    simple: bool,
    trail: &mut Vec<NodeId>,
    out: &mut PathSet,
) {
    let here = *trail.last().expect("non-empty trail");
    for (next, _) in h.out_edges(here) {
        if !h.contains(next) {
            if (here, next) == exit {
                if trail.len() <= max_len {
                    let mut nodes = trail.clone();
                    nodes.push(next);
                    out.paths.push(Path(nodes));
                } else {
                    out.truncated = true;
                }
            }
            continue;
        }
        if simple && trail.contains(&next) {
            continue;
        }
        // the extended trail still needs an exit edge
        if trail.len() + 1 > max_len {
            out.truncated = true;
            continue;
        }
        trail.push(next);
        walk_paths(h, exit, max_len, simple, trail, out);
        trail.pop();
    }
}

/// Checks that summing over `mode` paths is exact for `h`.
pub(crate) fn check_mode(h: &FlowGraph, dense: &Dense<'_>, mode: PathMode) -> Result<(), PathError> {
    if dense.is_acyclic() {
        return Ok(());
    }
    match mode {
        PathMode::All => Err(PathError::CyclicGraph),
        PathMode::Simple => {
            if !h.tag().is_idempotent() {
                Err(PathError::RequiresIdempotent)
            } else if !h.edges().values().all(EdgeFn::is_decreasing) {
                Err(PathError::RequiresDecreasing)
            } else {
                Ok(())
            }
        }
    }
}

/// Per-source path sums for every node of `h`.
pub fn source_summaries(h: &FlowGraph, mode: PathMode) -> Result<SourceSummary, PathError> {
    summaries_from(h, h.nodes(), mode)
}

/// Per-source path sums for the given sources only.
pub fn summaries_from(h: &FlowGraph, sources: &NodeSet, mode: PathMode) -> Result<SourceSummary, PathError> {
    let dense = Dense::new(h.nodes(), h.edges());
    check_mode(h, &dense, mode)?;
    let mut walker = Walker::new(h, &dense, mode == PathMode::Simple);
    let mut summary = SourceSummary::default();
    for &s in sources {
        let Ok(start) = dense.ids.binary_search(&s) else {
            return Err(PathError::NodeOutside(s));
        };
        walker.from(start, &mut |exit, f| summary.add(s, exit, f))?;
    }
    Ok(summary)
}

/// Depth-first enumeration of path functions, fused with composition.
pub(crate) struct Walker<'a> {
    tag: MonoidTag,
    ids: &'a [NodeId],
    /// Per node: internal successors (index, fn) and exits (target, fn).
    inner: Vec<Vec<(usize, &'a EdgeFn)>>,
    exits: Vec<Vec<(NodeId, &'a EdgeFn)>>,
    simple: bool,
    on_path: Vec<bool>,
}

impl<'a> Walker<'a> {
    pub(crate) fn new(h: &'a FlowGraph, dense: &'a Dense<'a>, simple: bool) -> Self {
        let n = dense.len();
        let mut inner = vec![Vec::new(); n];
        let mut exits = vec![Vec::new(); n];
        for (&(src, dst), f) in h.edges() {
            let s = dense.ids.binary_search(&src).expect("edge source inside");
            match dense.ids.binary_search(&dst) {
                Ok(d) => inner[s].push((d, f)),
                Err(_) => exits[s].push((dst, f)),
            }
        }
        Walker {
            tag: h.tag(),
            ids: &dense.ids,
            inner,
            exits,
            simple,
            on_path: vec![false; n],
        }
    }

    /// Calls `emit(exit, E_p)` for every path from `start`, pruning paths
    /// whose function is already zero.
    pub(crate) fn from<F>(&mut self, start: usize, emit: &mut F) -> Result<(), MonoidError>
    where
        F: FnMut((NodeId, NodeId), EdgeFn) -> Result<(), MonoidError>,
    {
        self.visit(start, EdgeFn::identity(self.tag), emit)
    }

    fn visit<F>(&mut self, at: usize, acc: EdgeFn, emit: &mut F) -> Result<(), MonoidError>
    where
        F: FnMut((NodeId, NodeId), EdgeFn) -> Result<(), MonoidError>,
    {
        for &(z, f) in &self.exits[at] {
            let g = acc.then(f)?;
            if !g.is_zero() {
                emit((self.ids[at], z), g)?;
            }
        }
        self.on_path[at] = true;
        for i in 0..self.inner[at].len() {
            let (next, f) = self.inner[at][i];
            if self.simple && self.on_path[next] {
                continue;
            }
            let g = acc.then(f)?;
            if g.is_zero() {
                continue;
            }
            self.visit(next, g, emit)?;
        }
        self.on_path[at] = false;
        Ok(())
    }
}

fn inflow_per_node(h: &FlowGraph, inflow: &InflowMap) -> Result<BTreeMap<NodeId, FlowValue>, PathError> {
    let g = h.with_inflow(inflow.clone())?;
    let mut per = BTreeMap::new();
    for &x in g.nodes() {
        let v = g.inflow_at(x)?;
        if !v.is_zero() {
            per.insert(x, v);
        }
    }
    Ok(per)
}

fn path_transfer(h: &FlowGraph, inflow: &InflowMap, mode: PathMode) -> Result<Outflow, PathError> {
    let per = inflow_per_node(h, inflow)?;
    let sources: NodeSet = per.keys().copied().collect();
    let summary = summaries_from(h, &sources, mode)?;
    Ok(summary.apply(&per)?)
}

/// The transfer function evaluated as a sum over all paths. Refuses cyclic
/// graphs.
pub fn closed_form_transfer(h: &FlowGraph, inflow: &InflowMap) -> Result<Outflow, PathError> {
    path_transfer(h, inflow, PathMode::All)
}

/// The transfer function evaluated as a sum over simple paths. On a cyclic
/// graph this needs idempotent addition and decreasing edge functions.
pub fn simple_path_transfer(h: &FlowGraph, inflow: &InflowMap) -> Result<Outflow, PathError> {
    path_transfer(h, inflow, PathMode::Simple)
}

/// Path replacement of `h1` by `h2` from `sources`: every simple path `p` of
/// `h1` is dominated by the sum of the simple paths of `h2` with the same
/// start and exit.
///
/// Both directions with `sources` = the nodes whose edges differ decide
/// whether the transfer functions of `h1` and `h2` coincide.
pub fn path_replacement_holds(h1: &FlowGraph, h2: &FlowGraph, sources: &NodeSet) -> Result<bool, PathError> {
    if h1.nodes() != h2.nodes() {
        return Err(PathError::NodeSetMismatch);
    }
    for h in [h1, h2] {
        if !h.tag().is_idempotent() {
            return Err(PathError::RequiresIdempotent);
        }
        if !h.edges().values().all(EdgeFn::is_decreasing) {
            return Err(PathError::RequiresDecreasing);
        }
    }
    let sources: NodeSet = sources.intersection(h1.nodes()).copied().collect();
    let replacement = summaries_from(h2, &sources, PathMode::Simple)?;
    let dense = Dense::new(h1.nodes(), h1.edges());
    let mut walker = Walker::new(h1, &dense, true);
    let zero = EdgeFn::zero(h1.tag());
    for &s in &sources {
        let start = dense.ids.binary_search(&s).expect("source inside");
        let mut holds = true;
        walker.from(start, &mut |exit, f| {
            let bound = replacement.get(s, exit).unwrap_or(&zero);
            holds &= f.leq(bound)?;
            Ok(())
        })?;
        if !holds {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::node_set;
    use crate::monoid::{ExtInt, ExtNat, KeySet};
    use crate::testing::{self, fig2, fig4};

    #[test]
    fn path_fn_examples() {
        let h = fig2::before();
        let p = Path::new(vec![fig2::L, fig2::T, fig2::R, fig2::SINK]).unwrap();
        assert_eq!(path_fn(&h, &p).unwrap(), fig2::lambda(8));

        let q = Path::new(vec![fig2::R, fig2::SINK]).unwrap();
        assert_eq!(path_fn(&h, &q).unwrap(), fig2::lambda(8));

        let id = EdgeFn::identity(MonoidTag::Counting);
        let chain = FlowGraph::new(
            MonoidTag::Counting,
            node_set([1u32, 2, 3]),
            [
                ((NodeId(1), NodeId(2)), id.clone()),
                ((NodeId(2), NodeId(3)), id.clone()),
                ((NodeId(3), NodeId(9)), id.clone()),
            ],
            [],
        )
        .unwrap();
        let p = Path::new(vec![NodeId(1), NodeId(2), NodeId(3), NodeId(9)]).unwrap();
        assert_eq!(path_fn(&chain, &p).unwrap(), id);

        let bogus = Path::new(vec![fig2::L, fig2::R, fig2::SINK]).unwrap();
        assert!(matches!(path_fn(&h, &bogus), Err(PathError::NotAPath(_))));
        let ends_inside = Path::new(vec![fig2::L, fig2::T]).unwrap();
        assert!(matches!(path_fn(&h, &ends_inside), Err(PathError::NotAPath(_))));
    }

    #[test]
    fn enumerate_cyclic_graph_paths() {
        let h1 = fig4::before();
        let exit = (fig4::Y, fig4::V);
        let simple = enum_simple_paths(&h1, fig4::X, exit).unwrap();
        let expected = Path::new(vec![fig4::X, fig4::Z, fig4::U, fig4::Y, fig4::V]).unwrap();
        assert_eq!(simple, vec![expected.clone()]);

        // the cycle y → z → u → y makes the full set infinite
        let bounded = enum_paths(&h1, fig4::X, exit, 7).unwrap();
        assert!(bounded.truncated);
        assert_eq!(bounded.paths.len(), 2);
        assert_eq!(bounded.paths[0], expected);
        assert!(!bounded.paths[1].is_simple());

        let direct = enum_simple_paths(&h1, fig4::Y, exit).unwrap();
        assert_eq!(direct, vec![Path::new(vec![fig4::Y, fig4::V]).unwrap()]);

        assert_eq!(
            enum_paths(&h1, fig4::X, (fig4::X, fig4::Z), 4).unwrap_err(),
            PathError::ExitNotBoundary(fig4::X, fig4::Z)
        );
        assert_eq!(
            enum_simple_paths(&h1, fig4::V, exit).unwrap_err(),
            PathError::NodeOutside(fig4::V)
        );
    }

    #[test]
    fn self_loop_is_skipped_by_simple_paths() {
        let id = EdgeFn::Cap(ExtNat::Inf);
        let h = FlowGraph::new(
            MonoidTag::MaxCap,
            node_set([1u32]),
            [((NodeId(1), NodeId(1)), id.clone()), ((NodeId(1), NodeId(5)), id)],
            [],
        )
        .unwrap();
        let exit = (NodeId(1), NodeId(5));
        assert_eq!(enum_simple_paths(&h, NodeId(1), exit).unwrap().len(), 1);
        let all = enum_paths(&h, NodeId(1), exit, 3).unwrap();
        assert_eq!(all.paths.len(), 3);
        assert!(all.truncated);
    }

    #[test]
    fn acyclic_path_sets_coincide() {
        let h = testing::fig1_whole();
        for (exit, _) in h.exits() {
            for &x in h.nodes() {
                let all = enum_paths(&h, x, exit, 16).unwrap();
                assert!(!all.truncated);
                assert_eq!(all.paths, enum_simple_paths(&h, x, exit).unwrap());
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let h = fig2::before();
        let out = closed_form_transfer(&h, h.inflow()).unwrap();
        assert_eq!(out, h.outflow().unwrap());
        assert_eq!(out[&(fig2::R, fig2::SINK)], fig2::above(8));
        assert!(closed_form_transfer(&h, &InflowMap::new()).unwrap().is_empty());

        let cyclic = fig4::before();
        assert_eq!(
            closed_form_transfer(&cyclic, cyclic.inflow()).unwrap_err(),
            PathError::CyclicGraph
        );
    }

    #[test]
    fn simple_path_examples() {
        let h = fig4::before();
        let out = simple_path_transfer(&h, h.inflow()).unwrap();
        assert_eq!(out[&(fig4::Y, fig4::V)], FlowValue::max_cap(fig4::K));
        assert_eq!(out, h.outflow().unwrap());

        // two-node keyset cycle
        let a = NodeId(1);
        let b = NodeId(2);
        let ring = FlowGraph::new(
            MonoidTag::Keyset,
            [a, b],
            [
                ((a, b), EdgeFn::keyset_lambda(ExtInt::Fin(2))),
                (
                    (b, a),
                    EdgeFn::Intersect(KeySet::interval(ExtInt::Fin(0), ExtInt::Fin(9))),
                ),
                ((b, NodeId(7)), EdgeFn::keyset_lambda(ExtInt::Fin(5))),
                ((a, NodeId(8)), EdgeFn::identity(MonoidTag::Keyset)),
            ],
            [((NodeId(0), a), FlowValue::Keyset(KeySet::integers()))],
        )
        .unwrap();
        assert_eq!(
            simple_path_transfer(&ring, ring.inflow()).unwrap(),
            ring.outflow().unwrap()
        );

        let counting = FlowGraph::new(
            MonoidTag::Counting,
            [a, b],
            [
                ((a, b), EdgeFn::identity(MonoidTag::Counting)),
                ((b, a), EdgeFn::identity(MonoidTag::Counting)),
            ],
            [],
        )
        .unwrap();
        assert_eq!(
            simple_path_transfer(&counting, &InflowMap::new()).unwrap_err(),
            PathError::RequiresIdempotent
        );
        // acyclic counting graphs have no repeated nodes to worry about
        let acyclic = testing::fig1_whole();
        assert_eq!(
            simple_path_transfer(&acyclic, acyclic.inflow()).unwrap(),
            acyclic.outflow().unwrap()
        );
    }

    #[test]
    fn summaries_examples() {
        let h = fig2::before();
        let s = source_summaries(&h, PathMode::All).unwrap();
        assert_eq!(s.get(fig2::L, (fig2::R, fig2::SINK)), Some(&fig2::lambda(8)));
        assert_eq!(s.get(fig2::T, (fig2::R, fig2::SINK)), Some(&fig2::lambda(8)));

        // v has no route to any exit
        let whole = testing::fig1_whole();
        let s = source_summaries(&whole, PathMode::Simple).unwrap();
        assert!(s.iter().all(|(src, _, _)| src != testing::V));
    }

    #[test]
    fn path_replacement_examples() {
        let (h1, h2) = (fig2::before(), fig2::after());
        let l = node_set([fig2::L]);
        assert!(path_replacement_holds(&h1, &h2, &l).unwrap());
        assert!(path_replacement_holds(&h2, &h1, &l).unwrap());
        assert!(path_replacement_holds(&h1, &h1, h1.nodes()).unwrap());

        let (g1, g2) = (fig4::before(), fig4::after());
        let x = node_set([fig4::X]);
        assert!(path_replacement_holds(&g1, &g2, &x).unwrap());
        assert!(path_replacement_holds(&g2, &g1, &x).unwrap());

        let counting = testing::fig1_whole();
        assert_eq!(
            path_replacement_holds(&counting, &counting, counting.nodes()).unwrap_err(),
            PathError::RequiresIdempotent
        );
    }
}
