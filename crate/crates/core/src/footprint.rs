//! Flow footprints of graph updates.
//!
//! A footprint of `(h1, h2)` is a node set `Y` such that the restrictions of
//! the two graphs to `Y` are contextually equivalent and the restrictions to
//! the rest are identical. It is computed as the least fixed point of
//!
//! ```text
//! ext(Z) = ⊤                          if tfail(Z) ⊄ X
//!        = Z ∪ out(h1, h2) ∪ tfail(Z) otherwise
//! ```
//!
//! starting from the nodes whose outgoing edges differ.
//!
//! The transfer-failure check asks whether some inflow below the inflow of
//! `h1|Z` makes the two restrictions send different values over an exit.
//! Edge functions are distributive, so the outflow over an exit splits into
//! one summand per source node, `Σ_s F_s(in_s)`, with `F_s(0) = 0`. Zeroing
//! every other source shows that the sums can be told apart below the bound
//! exactly when some single summand can, so the check reduces to a bounded
//! equality test per source on the summary functions, which is decided in
//! closed form.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dense, FlowGraph, GraphError, NodeId, NodeSet};
use crate::monoid::{EdgeFn, MonoidError};
use crate::oracle::{self, EnumBudget, OracleError};
use crate::paths::{self, PathError, PathMode, SourceSummary};

/// How transfer functions of restrictions are summarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    /// Symbolic Kleene iteration of the flow within the candidate; acyclic
    /// restrictions only.
    Naive,
    /// Sums over all paths; acyclic restrictions only.
    Dist,
    /// Sums over simple paths; cycles need idempotent addition and
    /// decreasing edge functions.
    New,
}

impl MethodTag {
    pub const ALL: [MethodTag; 3] = [MethodTag::Naive, MethodTag::Dist, MethodTag::New];

    pub fn name(self) -> &'static str {
        match self {
            MethodTag::Naive => "naive",
            MethodTag::Dist => "dist",
            MethodTag::New => "new",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected naive, dist or new)"))
    }
}

/// Why two graphs cannot have a footprint at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mismatch {
    Monoid,
    Nodes,
    Inflow,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mismatch::Monoid => "the graphs use different monoids",
            Mismatch::Nodes => "the graphs have different node sets",
            Mismatch::Inflow => "the graphs have different inflows",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FootprintError {
    #[error("no footprint exists: {0}")]
    NoFootprintByDefinition(Mismatch),
    #[error("the graphs have different node sets")]
    NodeSetMismatch,
    #[error("node {0} is not in the graphs")]
    NodeOutside(NodeId),
    #[error("a restriction contains a cycle")]
    CyclicRestriction,
    #[error("cyclic restrictions need idempotent addition")]
    RequiresIdempotent,
    #[error("cyclic restrictions need decreasing edge functions")]
    RequiresDecreasing,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Path(PathError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<PathError> for FootprintError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::CyclicGraph => FootprintError::CyclicRestriction,
            PathError::RequiresIdempotent => FootprintError::RequiresIdempotent,
            PathError::RequiresDecreasing => FootprintError::RequiresDecreasing,
            PathError::NodeSetMismatch => FootprintError::NodeSetMismatch,
            PathError::NodeOutside(x) => FootprintError::NodeOutside(x),
            PathError::Graph(g) => FootprintError::Graph(g),
            PathError::Monoid(m) => FootprintError::Monoid(m),
            other => FootprintError::Path(other),
        }
    }
}

/// Outcome of the fixed-point computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Footprint {
    Nodes(NodeSet),
    /// The candidate escaped the node set.
    Top,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintResult {
    pub footprint: Footprint,
    /// The distinct candidates `Z0 ⊂ Z1 ⊂ …` in order.
    pub trace: Vec<NodeSet>,
}

impl FootprintResult {
    pub fn nodes(&self) -> Option<&NodeSet> {
        match &self.footprint {
            Footprint::Nodes(y) => Some(y),
            Footprint::Top => None,
        }
    }

    pub fn is_top(&self) -> bool {
        self.footprint == Footprint::Top
    }
}

/// One application of `ext`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(NodeSet),
    Top,
}

/// How [`verify_footprint`] decides contextual equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyMode {
    /// Summary functions compared in closed form.
    Algebraic,
    /// Exhaustive enumeration of inflows.
    Oracle(EnumBudget),
}

/// `out(h1, h2)`: the nodes whose outgoing edges differ.
pub fn out_diff(h1: &FlowGraph, h2: &FlowGraph) -> Result<NodeSet, FootprintError> {
    if h1.nodes() != h2.nodes() {
        return Err(FootprintError::NodeSetMismatch);
    }
    let mut diff = NodeSet::new();
    // both maps are sparse and canonical, so a merged walk finds every
    // differing entry
    let mut a = h1.edges().iter().peekable();
    let mut b = h2.edges().iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some((ka, fa)), Some((kb, fb))) if ka == kb => {
                if fa != fb {
                    diff.insert(ka.0);
                }
                a.next();
                b.next();
            }
            (Some((ka, _)), Some((kb, _))) if ka < kb => {
                diff.insert(ka.0);
                a.next();
            }
            (Some(_), Some((kb, _))) => {
                diff.insert(kb.0);
                b.next();
            }
            (Some((ka, _)), None) => {
                diff.insert(ka.0);
                a.next();
            }
            (None, Some((kb, _))) => {
                diff.insert(kb.0);
                b.next();
            }
        }
    }
    Ok(diff)
}

fn check_subset(h: &FlowGraph, z: &NodeSet) -> Result<(), FootprintError> {
    match z.iter().find(|x| !h.contains(**x)) {
        Some(&x) => Err(FootprintError::NodeOutside(x)),
        None => Ok(()),
    }
}

/// Symbolic flow at every node as a function of the inflow at each source,
/// by Jacobi-style Kleene rounds, then pushed over the exit edges.
fn naive_summaries(h: &FlowGraph, sources: &NodeSet) -> Result<SourceSummary, FootprintError> {
    let dense = Dense::new(h.nodes(), h.edges());
    if !dense.is_acyclic() {
        return Err(FootprintError::CyclicRestriction);
    }
    let tag = h.tag();
    let n = dense.len();
    let srcs: Vec<usize> = sources
        .iter()
        .map(|s| {
            dense
                .ids
                .binary_search(s)
                .map_err(|_| FootprintError::NodeOutside(*s))
        })
        .collect::<Result<_, _>>()?;
    let zero = EdgeFn::zero(tag);
    let id = EdgeFn::identity(tag);
    let mut vals = vec![vec![zero.clone(); srcs.len()]; n];
    // an acyclic graph stabilizes after at most `n` rounds
    for _ in 0..=n {
        let mut next = vec![vec![zero.clone(); srcs.len()]; n];
        for (x, row) in next.iter_mut().enumerate() {
            for (i, &s) in srcs.iter().enumerate() {
                let mut acc = if s == x { id.clone() } else { zero.clone() };
                for &(y, f) in &dense.preds[x] {
                    acc = acc.sum(&vals[y][i].then(f)?)?;
                }
                row[i] = acc;
            }
        }
        if next == vals {
            break;
        }
        vals = next;
    }
    let mut summary = SourceSummary::default();
    for ((y, z), f) in h.exits() {
        let row = &vals[dense.ids.binary_search(&y).expect("exit source inside")];
        for (i, &s) in srcs.iter().enumerate() {
            let g = row[i].then(f)?;
            if !g.is_zero() {
                summary.add(dense.ids[s], (y, z), g)?;
            }
        }
    }
    Ok(summary)
}

fn summaries(h: &FlowGraph, sources: &NodeSet, method: MethodTag) -> Result<SourceSummary, FootprintError> {
    match method {
        MethodTag::Naive => naive_summaries(h, sources),
        MethodTag::Dist => Ok(paths::summaries_from(h, sources, PathMode::All)?),
        MethodTag::New => Ok(paths::summaries_from(h, sources, PathMode::Simple)?),
    }
}

/// Exits `(y, x)` of `r1`/`r2` whose summed value can differ for some inflow
/// below the inflow of `r1`.
fn differing_exits(
    r1: &FlowGraph,
    r2: &FlowGraph,
    method: MethodTag,
) -> Result<BTreeSet<(NodeId, NodeId)>, FootprintError> {
    let mut bounds = std::collections::BTreeMap::new();
    for &s in r1.nodes() {
        let v = r1.inflow_at(s)?;
        if !v.is_zero() {
            bounds.insert(s, v);
        }
    }
    let sources: NodeSet = bounds.keys().copied().collect();
    let s1 = summaries(r1, &sources, method)?;
    let s2 = summaries(r2, &sources, method)?;
    let zero = EdgeFn::zero(r1.tag());
    let mut failing = BTreeSet::new();
    let keys: BTreeSet<(NodeId, (NodeId, NodeId))> =
        s1.iter().chain(s2.iter()).map(|(s, e, _)| (s, e)).collect();
    for (s, exit) in keys {
        if failing.contains(&exit) {
            continue;
        }
        let f1 = s1.get(s, exit).unwrap_or(&zero);
        let f2 = s2.get(s, exit).unwrap_or(&zero);
        if !f1.eq_below(f2, &bounds[&s])? {
            failing.insert(exit);
        }
    }
    Ok(failing)
}

/// `tfail(h1, h2)(Z)`: the nodes outside `Z`, possibly external to the
/// graphs, that may receive different outflow from `Z` under some inflow
/// below that of `h1|Z`.
pub fn transfer_failure(
    h1: &FlowGraph,
    h2: &FlowGraph,
    z: &NodeSet,
    method: MethodTag,
) -> Result<NodeSet, FootprintError> {
    if h1.nodes() != h2.nodes() {
        return Err(FootprintError::NodeSetMismatch);
    }
    check_subset(h1, z)?;
    let r1 = h1.restrict(z)?;
    let r2 = h2.restrict(z)?;
    Ok(differing_exits(&r1, &r2, method)?
        .into_iter()
        .map(|(_, x)| x)
        .collect())
}

/// `ext(Z)`.
pub fn extend_step(
    h1: &FlowGraph,
    h2: &FlowGraph,
    z: &NodeSet,
    method: MethodTag,
) -> Result<Step, FootprintError> {
    let fail = transfer_failure(h1, h2, z, method)?;
    if fail.iter().any(|x| !h1.contains(*x)) {
        return Ok(Step::Top);
    }
    let mut next = z.clone();
    next.extend(out_diff(h1, h2)?);
    next.extend(fail);
    Ok(Step::Next(next))
}

fn check_comparable(h1: &FlowGraph, h2: &FlowGraph) -> Result<(), Mismatch> {
    if h1.tag() != h2.tag() {
        Err(Mismatch::Monoid)
    } else if h1.nodes() != h2.nodes() {
        Err(Mismatch::Nodes)
    } else if h1.inflow() != h2.inflow() {
        Err(Mismatch::Inflow)
    } else {
        Ok(())
    }
}

/// Iterates `ext` from `out(h1, h2)` to its least fixed point. A result
/// `Nodes(Y)` is a footprint; `Top` means the method found none, which does
/// not mean none exists.
pub fn compute_footprint(
    h1: &FlowGraph,
    h2: &FlowGraph,
    method: MethodTag,
) -> Result<FootprintResult, FootprintError> {
    check_comparable(h1, h2).map_err(FootprintError::NoFootprintByDefinition)?;
    let mut z = out_diff(h1, h2)?;
    let mut trace = vec![z.clone()];
    if z.is_empty() {
        return Ok(FootprintResult {
            footprint: Footprint::Nodes(z),
            trace,
        });
    }
    // Z grows strictly until it is stable, so this runs at most |X| times
    loop {
        match extend_step(h1, h2, &z, method)? {
            Step::Top => {
                return Ok(FootprintResult {
                    footprint: Footprint::Top,
                    trace,
                })
            }
            Step::Next(next) if next == z => {
                return Ok(FootprintResult {
                    footprint: Footprint::Nodes(z),
                    trace,
                })
            }
            Step::Next(next) => {
                trace.push(next.clone());
                z = next;
            }
        }
    }
}

/// Decides contextual equivalence of two graphs over the same nodes without
/// enumerating inflows.
pub fn ctx_equiv(r1: &FlowGraph, r2: &FlowGraph) -> Result<bool, FootprintError> {
    if check_comparable(r1, r2).is_err() {
        return Ok(false);
    }
    let idempotent = r1.tag().is_idempotent();
    let decreasing = r1
        .edges()
        .values()
        .chain(r2.edges().values())
        .all(EdgeFn::is_decreasing);
    if idempotent && decreasing {
        // equal transfer functions everywhere is the common case
        let all = r1.nodes();
        if paths::path_replacement_holds(r1, r2, all)? && paths::path_replacement_holds(r2, r1, all)? {
            return Ok(true);
        }
    }
    let acyclic = r1.is_acyclic() && r2.is_acyclic();
    let method = if acyclic {
        MethodTag::Dist
    } else if !idempotent {
        return Err(FootprintError::RequiresIdempotent);
    } else if !decreasing {
        return Err(FootprintError::RequiresDecreasing);
    } else {
        MethodTag::New
    };
    Ok(differing_exits(r1, r2, method)?.is_empty())
}

/// Checks both clauses of the footprint definition for `Y`.
pub fn verify_footprint(
    h1: &FlowGraph,
    h2: &FlowGraph,
    y: &NodeSet,
    mode: &VerifyMode,
) -> Result<bool, FootprintError> {
    if check_comparable(h1, h2).is_err() {
        return Ok(false);
    }
    check_subset(h1, y)?;
    let rest: NodeSet = h1.nodes().difference(y).copied().collect();
    if h1.restrict(&rest)? != h2.restrict(&rest)? {
        return Ok(false);
    }
    let r1 = h1.restrict(y)?;
    let r2 = h2.restrict(y)?;
    match mode {
        VerifyMode::Algebraic => ctx_equiv(&r1, &r2),
        VerifyMode::Oracle(budget) => Ok(oracle::oracle_ctx_equiv(&r1, &r2, budget)?),
    }
}
