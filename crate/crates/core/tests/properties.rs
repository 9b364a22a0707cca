use std::collections::BTreeMap;

use flowfoot_core::graph::{EdgeMap, InflowMap, NodeSet};
use flowfoot_core::{EdgeFn, ExtInt, ExtNat, FlowGraph, FlowValue, KeySet, MonoidTag, NodeId};
use proptest::prelude::*;

fn tag() -> impl Strategy<Value = MonoidTag> {
    prop::sample::select(MonoidTag::ALL.to_vec())
}

fn nat(max: u64) -> impl Strategy<Value = ExtNat> {
    prop_oneof![
        9 => (0..=max).prop_map(ExtNat::Fin),
        1 => Just(ExtNat::Inf),
    ]
}

fn key() -> impl Strategy<Value = ExtInt> {
    prop_oneof![
        1 => Just(ExtInt::NegInf),
        8 => (-3i64..8).prop_map(ExtInt::Fin),
        1 => Just(ExtInt::PosInf),
    ]
}

fn keyset() -> impl Strategy<Value = KeySet> {
    prop::collection::vec((key(), key()), 0..3)
        .prop_map(|ivs| KeySet::from_intervals(ivs.into_iter().map(|(a, b)| (a.min(b), a.max(b)))))
}

fn value(tag: MonoidTag) -> BoxedStrategy<FlowValue> {
    match tag {
        MonoidTag::Counting => nat(4).prop_map(FlowValue::Counting).boxed(),
        MonoidTag::Keyset => keyset().prop_map(FlowValue::Keyset).boxed(),
        MonoidTag::MaxCap => nat(9).prop_map(FlowValue::MaxCap).boxed(),
    }
}

fn edge_fn(tag: MonoidTag) -> BoxedStrategy<EdgeFn> {
    match tag {
        MonoidTag::Counting => nat(2).prop_map(EdgeFn::Scale).boxed(),
        MonoidTag::Keyset => keyset().prop_map(EdgeFn::Intersect).boxed(),
        MonoidTag::MaxCap => nat(9).prop_map(EdgeFn::Cap).boxed(),
    }
}

fn values3() -> impl Strategy<Value = (FlowValue, FlowValue, FlowValue)> {
    tag().prop_flat_map(|t| (value(t), value(t), value(t)))
}

/// A graph on nodes `1..=n` with exits to 9 and inflow from 0.
fn graph() -> impl Strategy<Value = FlowGraph> {
    (tag(), 1u32..6).prop_flat_map(|(t, n)| {
        let targets: Vec<u32> = (1..=n).chain([9]).collect();
        let edges = prop::collection::vec(
            ((1..=n), prop::sample::select(targets), edge_fn(t)),
            0..(2 * n as usize + 2),
        );
        let inflow = prop::collection::vec(((1..=n), value(t)), 0..(n as usize + 1));
        (edges, inflow).prop_map(move |(edges, inflow)| build(t, n, edges, inflow))
    })
}

fn build(t: MonoidTag, n: u32, edges: Vec<(u32, u32, EdgeFn)>, inflow: Vec<(u32, FlowValue)>) -> FlowGraph {
    let mut e = EdgeMap::new();
    for (a, b, f) in edges {
        if !f.is_zero() {
            e.insert((NodeId(a), NodeId(b)), f);
        }
    }
    let mut i = InflowMap::new();
    for (x, v) in inflow {
        if !v.is_zero() {
            i.insert((NodeId(0), NodeId(x)), v);
        }
    }
    FlowGraph::new(t, (1..=n).map(NodeId), e, i).expect("well formed")
}

fn add(a: &FlowValue, b: &FlowValue) -> FlowValue {
    a.add(b).expect("same tag")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn monoid_laws((a, b, c) in values3()) {
        let zero = FlowValue::zero(a.tag());
        prop_assert_eq!(add(&a, &zero), a.clone());
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        prop_assert!(a.leq(&add(&a, &b)).unwrap());
        prop_assert!(a.leq(&a).unwrap());
        if a.leq(&b).unwrap() && b.leq(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if a.leq(&b).unwrap() && b.leq(&c).unwrap() {
            prop_assert!(a.leq(&c).unwrap());
        }
    }

    #[test]
    fn edge_functions_distribute((f, a, b) in tag().prop_flat_map(|t| (edge_fn(t), value(t), value(t)))) {
        let fa = f.apply(&a).unwrap();
        prop_assert_eq!(f.apply(&add(&a, &b)).unwrap(), add(&fa, &f.apply(&b).unwrap()));
        prop_assert!(f.apply(&FlowValue::zero(f.tag())).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// The computed flow solves the flow equation.
    #[test]
    fn flow_equation(h in graph()) {
        let flow = h.flow().unwrap();
        for &x in h.nodes() {
            let mut want = h.inflow_at(x).unwrap();
            for &y in h.nodes() {
                want = add(&want, &h.edge(y, x).apply(&flow[&y]).unwrap());
            }
            prop_assert_eq!(&flow[&x], &want);
        }
    }

    #[test]
    fn flow_is_monotone_in_inflow(h in graph(), extra in prop::collection::vec(0usize..5, 0..4)) {
        // raise some inflow entries to the top value
        let top = match h.tag() {
            MonoidTag::Keyset => FlowValue::Keyset(KeySet::full()),
            MonoidTag::Counting => FlowValue::Counting(ExtNat::Inf),
            MonoidTag::MaxCap => FlowValue::MaxCap(ExtNat::Inf),
        };
        let nodes: Vec<NodeId> = h.nodes().iter().copied().collect();
        let mut bigger = h.inflow().clone();
        for i in extra {
            bigger.insert((NodeId(0), nodes[i % nodes.len()]), top.clone());
        }
        let g = h.with_inflow(bigger).unwrap();
        for (x, v) in h.flow().unwrap() {
            prop_assert!(v.leq(&g.flow().unwrap()[x]).unwrap());
        }
    }

    #[test]
    fn restriction(h in graph(), mask in any::<u8>(), mask2 in any::<u8>()) {
        let pick = |m: u8| -> NodeSet { h.nodes().iter().copied().filter(|x| m >> (x.0 % 8) & 1 == 1).collect() };
        let (y, z) = (pick(mask), pick(mask2));
        let hy = h.restrict(&y).unwrap();
        let flow: BTreeMap<_, _> = h.flow().unwrap().iter().filter(|(x, _)| y.contains(x)).map(|(x, v)| (*x, v.clone())).collect();
        prop_assert_eq!(hy.flow().unwrap(), &flow);
        let rest: NodeSet = h.nodes().difference(&y).copied().collect();
        prop_assert_eq!(hy.compose(&h.restrict(&rest).unwrap()).unwrap(), h.clone());
        let yz: NodeSet = y.intersection(&z).copied().collect();
        prop_assert_eq!(hy.restrict(&z).unwrap(), h.restrict(&yz).unwrap());
    }
}
