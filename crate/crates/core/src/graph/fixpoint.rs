//! Least-fixed-point solver for the flow equation
//! `fl(x) = in_x + Σ_y E(y,x)(fl(y))`.
//!
//! Chaotic (worklist) Kleene iteration from the all-zero mapping. Node
//! evaluation order is ascending by id so runs are reproducible.
//!
//! For the counting monoid a fed cycle climbs forever. Such a cycle is
//! detected exactly: every nonzero counting edge has factor `k ≥ 1`, so once
//! any node of a cyclic strongly connected component carries positive flow,
//! the least fixed point is `∞` on the whole component. With promotion
//! disabled the round cap is the only guard.

use std::collections::VecDeque;

use crate::monoid::{ExtNat, FlowValue, MonoidTag};

use super::{EdgeMap, Flow, GraphError, InflowMap, NodeId, NodeSet};

/// Tuning knobs for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixpointOptions {
    /// Maximum number of times any single node may change value.
    pub round_cap: usize,
    /// Jump cyclic counting components straight to `∞`.
    pub promote_unbounded: bool,
}

impl Default for FixpointOptions {
    fn default() -> Self {
        FixpointOptions {
            round_cap: 10_000,
            promote_unbounded: true,
        }
    }
}

/// Dense view of a graph's internal structure, indexed by position in the
/// sorted node list.
pub(crate) struct Dense<'a> {
    pub ids: Vec<NodeId>,
    /// Incoming internal edges per node: (source index, edge).
    pub preds: Vec<Vec<(usize, &'a crate::monoid::EdgeFn)>>,
    /// Outgoing internal edges per node: target indices.
    pub succs: Vec<Vec<usize>>,
}

impl<'a> Dense<'a> {
    pub fn new(nodes: &NodeSet, edges: &'a EdgeMap) -> Self {
        let ids: Vec<NodeId> = nodes.iter().copied().collect();
        let mut preds = vec![Vec::new(); ids.len()];
        let mut succs = vec![Vec::new(); ids.len()];
        for (&(src, dst), f) in edges {
            let (Ok(s), Ok(d)) = (ids.binary_search(&src), ids.binary_search(&dst)) else {
                continue;
            };
            preds[d].push((s, f));
            succs[s].push(d);
        }
        Dense { ids, preds, succs }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Strongly connected components (Tarjan); returns the component index of
    /// every node and whether that component contains a cycle.
    pub fn components(&self) -> (Vec<usize>, Vec<bool>) {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut cyclic = Vec::new();
        let mut next = 0;

        // iterative Tarjan: (node, next successor position)
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < self.succs[v].len() {
                    let w = self.succs[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = cyclic.len();
                    let mut size = 0;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = id;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    let self_loop = self.succs[v].contains(&v);
                    cyclic.push(size > 1 || self_loop);
                }
            }
        }
        (comp, cyclic)
    }

    pub fn is_acyclic(&self) -> bool {
        let (_, cyclic) = self.components();
        !cyclic.into_iter().any(|c| c)
    }
}

/// Sums the inflow entries per target node.
pub(crate) fn inflow_sums(
    tag: MonoidTag,
    dense: &Dense<'_>,
    inflow: &InflowMap,
) -> Result<Vec<FlowValue>, GraphError> {
    let mut sums = vec![FlowValue::zero(tag); dense.len()];
    for (&(_, dst), v) in inflow {
        if let Ok(d) = dense.ids.binary_search(&dst) {
            sums[d] = sums[d].add(v)?;
        }
    }
    Ok(sums)
}

/// Computes the least solution of the flow equation.
pub(crate) fn solve(
    tag: MonoidTag,
    nodes: &NodeSet,
    edges: &EdgeMap,
    inflow: &InflowMap,
    opts: FixpointOptions,
) -> Result<Flow, GraphError> {
    let dense = Dense::new(nodes, edges);
    let n = dense.len();
    let base = inflow_sums(tag, &dense, inflow)?;

    let promote = opts.promote_unbounded && tag == MonoidTag::Counting;
    let (comp, cyclic) = if promote {
        dense.components()
    } else {
        (Vec::new(), Vec::new())
    };

    let mut values = vec![FlowValue::zero(tag); n];
    let mut updates = vec![0usize; n];
    let mut queued = vec![true; n];
    let mut work: VecDeque<usize> = (0..n).collect();

    while let Some(x) = work.pop_front() {
        queued[x] = false;
        let mut next = base[x].clone();
        for &(y, f) in &dense.preds[x] {
            next = next.add(&f.apply(&values[y])?)?;
        }
        if next == values[x] {
            continue;
        }
        if promote && cyclic[comp[x]] && !next.is_zero() {
            let c = comp[x];
            for z in (0..n).filter(|&z| comp[z] == c) {
                values[z] = FlowValue::Counting(ExtNat::Inf);
                for &s in &dense.succs[z] {
                    if !queued[s] {
                        queued[s] = true;
                        work.push_back(s);
                    }
                }
            }
            continue;
        }
        updates[x] += 1;
        if updates[x] > opts.round_cap {
            return Err(GraphError::NonTermination { cap: opts.round_cap });
        }
        values[x] = next;
        for &s in &dense.succs[x] {
            if !queued[s] {
                queued[s] = true;
                work.push_back(s);
            }
        }
    }

    Ok(dense.ids.into_iter().zip(values).collect())
}
