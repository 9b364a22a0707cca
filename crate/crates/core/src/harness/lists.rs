//! Keyset flow graphs of sorted linked lists and their updates.
//!
//! A list node with key `k` forwards every search for a key above `k` to its
//! successor, so its outgoing edge is `λ_k`. A marked (logically deleted)
//! node no longer stops any search and forwards with `λ_{−∞}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{FlowGraph, NodeId};
use crate::monoid::{EdgeFn, ExtInt, FlowValue, KeySet, MonoidTag};

use super::{HarnessError, Instance};

/// External node that feeds the list head.
pub const LIST_SOURCE: NodeId = NodeId(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListNodeSpec {
    pub key: ExtInt,
    pub mark: bool,
    /// The successor; an id outside the list is an external node.
    pub next: NodeId,
}

impl ListNodeSpec {
    fn edge(&self) -> EdgeFn {
        if self.mark {
            EdgeFn::keyset_lambda(ExtInt::NegInf)
        } else {
            EdgeFn::keyset_lambda(self.key)
        }
    }
}

/// The flow graph of a list whose head `root` receives `root_inflow` from
/// [`LIST_SOURCE`].
pub fn list_graph(
    specs: &BTreeMap<NodeId, ListNodeSpec>,
    root: NodeId,
    root_inflow: KeySet,
) -> Result<FlowGraph, HarnessError> {
    if !specs.contains_key(&root) {
        return Err(HarnessError::BadParams(format!("root {root} is not a list node")));
    }
    if specs.contains_key(&LIST_SOURCE) {
        return Err(HarnessError::BadParams(format!(
            "node id {LIST_SOURCE} is reserved"
        )));
    }
    let edges = specs.iter().map(|(&x, s)| ((x, s.next), s.edge()));
    let inflow = [((LIST_SOURCE, root), FlowValue::Keyset(root_inflow))];
    FlowGraph::new(MonoidTag::Keyset, specs.keys().copied(), edges, inflow)
        .map_err(|e| HarnessError::BadParams(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ListOp {
    /// Link a pre-allocated node between two neighbours.
    Insert,
    /// Logically delete a node.
    Mark,
    /// Physically remove a marked node by redirecting its predecessor.
    Unlink,
}

impl ListOp {
    pub const ALL: [ListOp; 3] = [ListOp::Insert, ListOp::Mark, ListOp::Unlink];

    pub fn name(self) -> &'static str {
        match self {
            ListOp::Insert => "insert",
            ListOp::Mark => "mark",
            ListOp::Unlink => "unlink",
        }
    }
}

impl fmt::Display for ListOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ListOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ListOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown list operation `{s}`"))
    }
}

/// A random sorted list of `length` nodes and one update applied to it.
///
/// Nodes are `1..=length` in list order with strictly increasing keys spaced
/// two to four apart. The head receives every integer key. An insert also
/// allocates node `length + 1`, present but unreachable before the update.
/// The tail points at an external sink. Updates act in the interior of the
/// list where possible.
pub fn gen_list_update(kind: ListOp, length: usize, seed: u64) -> Result<Instance, HarnessError> {
    if !(2..=10_000).contains(&length) {
        return Err(HarnessError::BadParams(format!(
            "list length {length} not in 2..=10000"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = length as u32;
    let fresh = NodeId(n + 1);
    let sink = NodeId(n + 2);

    let mut key = rng.random_range(0..=2i64);
    let mut specs = BTreeMap::new();
    for i in 1..=n {
        let next = if i == n { sink } else { NodeId(i + 1) };
        specs.insert(
            NodeId(i),
            ListNodeSpec {
                key: ExtInt::Fin(key),
                mark: false,
                next,
            },
        );
        key += rng.random_range(2..=4i64);
    }

    let (before, after) = match kind {
        ListOp::Insert => {
            let at = NodeId(rng.random_range(1..n));
            let succ = specs[&at].next;
            let ExtInt::Fin(k) = specs[&at].key else {
                unreachable!("finite keys")
            };
            specs.insert(
                fresh,
                ListNodeSpec {
                    key: ExtInt::Fin(k + 1),
                    mark: false,
                    next: succ,
                },
            );
            let before = specs.clone();
            specs.get_mut(&at).expect("list node").next = fresh;
            (before, specs)
        }
        ListOp::Mark => {
            let at = NodeId(rng.random_range(1..n));
            let before = specs.clone();
            specs.get_mut(&at).expect("list node").mark = true;
            (before, specs)
        }
        ListOp::Unlink => {
            let t = if n == 2 {
                NodeId(2)
            } else {
                NodeId(rng.random_range(2..n))
            };
            let l = NodeId(t.0 - 1);
            specs.get_mut(&t).expect("list node").mark = true;
            let before = specs.clone();
            let succ = specs[&t].next;
            specs.get_mut(&l).expect("list node").next = succ;
            (before, specs)
        }
    };
    let root = NodeId(1);
    let before = list_graph(&before, root, KeySet::integers())?;
    let after = list_graph(&after, root, KeySet::integers())?;
    Instance::new(format!("{kind}-n{length}-s{seed}"), before, after)
}

/// A keyset ring `1 → 2 → … → length → 1`, fed at node 1 with keys `0..=20`,
/// where every node also exits to an external sink. The update widens every
/// ring edge by keys that never reach the ring, so the whole ring differs
/// syntactically while its transfer function is unchanged.
pub fn gen_cyclic_update(length: usize, seed: u64) -> Result<Instance, HarnessError> {
    if !(2..=64).contains(&length) {
        return Err(HarnessError::BadParams(format!(
            "ring length {length} not in 2..=64"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = length as u32;
    let sink = NodeId(100);
    let fin = ExtInt::Fin;
    let mut ring = Vec::new();
    let mut exits = Vec::new();
    for i in 1..=n {
        let next = NodeId(i % n + 1);
        let a = rng.random_range(0..=10i64);
        let b = rng.random_range(a..=20i64);
        ring.push(((NodeId(i), next), KeySet::interval(fin(a), fin(b))));
        exits.push((
            (NodeId(i), sink),
            EdgeFn::keyset_lambda(fin(rng.random_range(0..=20i64))),
        ));
    }
    let junk = KeySet::interval(fin(30), fin(40));
    let inflow = [(
        (LIST_SOURCE, NodeId(1)),
        FlowValue::Keyset(KeySet::interval(fin(0), fin(20))),
    )];
    let build = |widen: bool| {
        let edges = ring
            .iter()
            .map(|(k, s)| {
                (
                    *k,
                    EdgeFn::Intersect(if widen { s.union(&junk) } else { s.clone() }),
                )
            })
            .chain(exits.iter().cloned());
        FlowGraph::new(MonoidTag::Keyset, (1..=n).map(NodeId), edges, inflow.clone())
            .expect("ring is well formed")
    };
    Instance::new(format!("ring-n{length}-s{seed}"), build(false), build(true))
}

/// `count` list updates with lengths in `2..=8`, cycling through the three
/// operations, derived deterministically from `seed`.
pub fn list_suite(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let kind = ListOp::ALL[i % 3];
            let length = rng.random_range(2..=8usize);
            let mut inst = gen_list_update(kind, length, rng.random()).expect("valid parameters");
            inst.label = format!("{i:04}-{}", inst.label);
            inst
        })
        .collect()
}

/// `count` ring updates with lengths in `2..=6`.
pub fn cyclic_suite(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let length = rng.random_range(2..=6usize);
            let mut inst = gen_cyclic_update(length, rng.random()).expect("valid parameters");
            inst.label = format!("{i:04}-{}", inst.label);
            inst
        })
        .collect()
}
