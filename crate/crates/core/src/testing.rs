//! Hand-built flow graphs from the worked examples, shared by unit tests.
//!
//! Node numbering follows the shipped fixtures under `fixtures/`.

use crate::graph::{FlowGraph, NodeId};
use crate::monoid::{EdgeFn, ExtInt, ExtNat, FlowValue, KeySet, MonoidTag};

pub(crate) const X: NodeId = NodeId(1);
pub(crate) const Y: NodeId = NodeId(2);
pub(crate) const Z: NodeId = NodeId(3);
pub(crate) const R: NodeId = NodeId(4);
pub(crate) const U: NodeId = NodeId(5);
pub(crate) const V: NodeId = NodeId(6);
pub(crate) const ROOT_SRC: NodeId = NodeId(100);

fn id_count() -> EdgeFn {
    EdgeFn::identity(MonoidTag::Counting)
}

/// Path-counting graph on `{x, y, z}` fed by `r`, leaking into `u`.
pub(crate) fn fig1_left() -> FlowGraph {
    FlowGraph::new(
        MonoidTag::Counting,
        [X, Y, Z],
        [((X, Y), id_count()), ((X, Z), id_count()), ((Z, U), id_count())],
        [((R, X), FlowValue::count(1)), ((R, Y), FlowValue::count(1))],
    )
    .unwrap()
}

/// Path-counting graph on `{r, u, v}`.
pub(crate) fn fig1_right() -> FlowGraph {
    FlowGraph::new(
        MonoidTag::Counting,
        [R, U, V],
        [((R, X), id_count()), ((R, Y), id_count()), ((U, V), id_count())],
        [
            ((ROOT_SRC, R), FlowValue::count(1)),
            ((Z, U), FlowValue::count(1)),
        ],
    )
    .unwrap()
}

/// The composed graph on `{x, y, z, r, u, v}`.
pub(crate) fn fig1_whole() -> FlowGraph {
    FlowGraph::new(
        MonoidTag::Counting,
        [X, Y, Z, R, U, V],
        [
            ((X, Y), id_count()),
            ((X, Z), id_count()),
            ((Z, U), id_count()),
            ((R, X), id_count()),
            ((R, Y), id_count()),
            ((U, V), id_count()),
        ],
        [((ROOT_SRC, R), FlowValue::count(1))],
    )
    .unwrap()
}

/// `fig1_whole` with an extra identity edge `r → u`.
pub(crate) fn fig3_after() -> FlowGraph {
    let h = fig1_whole();
    let mut edges = h.edges().clone();
    edges.insert((R, U), id_count());
    FlowGraph::new(
        MonoidTag::Counting,
        h.nodes().iter().copied(),
        edges,
        h.inflow().clone(),
    )
    .unwrap()
}

/// Two halves of an unfed identity cycle `u → v → w → x → u`.
pub(crate) fn fig1b_pair() -> (FlowGraph, FlowGraph) {
    let (u, x, v, w) = (NodeId(1), NodeId(2), NodeId(3), NodeId(4));
    let h1 = FlowGraph::new(
        MonoidTag::Counting,
        [u, x],
        [((x, u), id_count()), ((u, v), id_count())],
        [((w, x), FlowValue::count(1))],
    )
    .unwrap();
    let h2 = FlowGraph::new(
        MonoidTag::Counting,
        [v, w],
        [((v, w), id_count()), ((w, x), id_count())],
        [((u, v), FlowValue::count(1))],
    )
    .unwrap();
    (h1, h2)
}

pub(crate) mod fig2 {
    use super::*;

    pub(crate) const SRC: NodeId = NodeId(0);
    pub(crate) const L: NodeId = NodeId(1);
    pub(crate) const T: NodeId = NodeId(2);
    pub(crate) const R: NodeId = NodeId(3);
    pub(crate) const SINK: NodeId = NodeId(4);

    pub(crate) fn lambda(k: i64) -> EdgeFn {
        EdgeFn::keyset_lambda(ExtInt::Fin(k))
    }

    pub(crate) fn above(k: i64) -> FlowValue {
        FlowValue::Keyset(KeySet::above(ExtInt::Fin(k)))
    }

    fn graph(l_target: NodeId) -> FlowGraph {
        FlowGraph::new(
            MonoidTag::Keyset,
            [L, T, R],
            [
                ((L, l_target), lambda(6)),
                ((T, R), EdgeFn::keyset_lambda(ExtInt::NegInf)),
                ((R, SINK), lambda(8)),
            ],
            [((SRC, L), above(3))],
        )
        .unwrap()
    }

    /// Sorted list `l(6) → t(marked) → r(8)`.
    pub(crate) fn before() -> FlowGraph {
        graph(T)
    }

    /// The same list after unlinking `t`.
    pub(crate) fn after() -> FlowGraph {
        graph(R)
    }
}

pub(crate) mod fig4 {
    use super::*;

    pub(crate) const SRC: NodeId = NodeId(0);
    pub(crate) const X: NodeId = NodeId(1);
    pub(crate) const Y: NodeId = NodeId(2);
    pub(crate) const Z: NodeId = NodeId(3);
    pub(crate) const U: NodeId = NodeId(4);
    pub(crate) const V: NodeId = NodeId(5);
    pub(crate) const K: u64 = 5;

    fn graph(x_target: NodeId) -> FlowGraph {
        let id = EdgeFn::Cap(ExtNat::Inf);
        FlowGraph::new(
            MonoidTag::MaxCap,
            [X, Y, Z, U],
            [
                ((X, x_target), id.clone()),
                ((Y, Z), id.clone()),
                ((Z, U), id.clone()),
                ((U, Y), id.clone()),
                ((Y, V), id),
            ],
            [((SRC, X), FlowValue::max_cap(K))],
        )
        .unwrap()
    }

    pub(crate) fn before() -> FlowGraph {
        graph(Z)
    }

    pub(crate) fn after() -> FlowGraph {
        graph(Y)
    }
}
