use std::collections::BTreeMap;

use super::*;
use crate::footprint::{compute_footprint, out_diff, Footprint, MethodTag};
use crate::graph::node_set;
use crate::monoid::{ExtInt, KeySet};
use crate::oracle::{oracle_footprints, EnumBudget};
use crate::testing::{self, fig2, fig4};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn fixtures_match_the_figures() {
    let fig3 = parse_instance(&fixture("fig3.json")).unwrap();
    assert_eq!(fig3.before, testing::fig1_whole());
    assert_eq!(fig3.after, testing::fig3_after());
    assert_eq!(fig3.name(testing::R), "r");
    assert_eq!(fig3.name(NodeId(42)), "42");

    let fig4 = parse_instance(&fixture("fig4.json")).unwrap();
    assert_eq!(fig4.tag(), MonoidTag::MaxCap);
    assert_eq!((fig4.before, fig4.after), (fig4::before(), fig4::after()));

    let fig2 = parse_instance(&fixture("fig2.json")).unwrap();
    assert_eq!((fig2.before, fig2.after), (fig2::before(), fig2::after()));

    let fig1 = parse_composition(&fixture("fig1.json")).unwrap();
    let a = fig1.case("a").unwrap();
    assert_eq!(
        (&a.left, &a.right),
        (&testing::fig1_left(), &testing::fig1_right())
    );
    let b = fig1.case("b").unwrap();
    assert!(b.left.compose(&b.right).unwrap_err().is_undefined());
}

#[test]
fn round_trip_is_canonical() {
    for name in ["fig2.json", "fig3.json", "fig4.json"] {
        let inst = parse_instance(&fixture(name)).unwrap();
        let text = serialize_instance(&inst);
        let again = parse_instance(&text).unwrap();
        assert_eq!(again, inst, "{name}");
        assert_eq!(serialize_instance(&again), text, "{name}");
    }
    let doc = parse_composition(&fixture("fig1.json")).unwrap();
    let text = serialize_composition(&doc);
    assert_eq!(parse_composition(&text).unwrap(), doc);
    assert_eq!(serialize_composition(&parse_composition(&text).unwrap()), text);
}

#[test]
fn parse_errors() {
    let good = fixture("fig4.json");

    let mismatched = good.replacen("\"value\": 5", "\"value\": 6", 1);
    assert_eq!(
        parse_instance(&mismatched).unwrap_err(),
        HarnessError::PreconditionViolation(crate::footprint::Mismatch::Inflow)
    );

    let unknown = good.replacen("\"label\"", "\"colour\": 1,\n  \"label\"", 1);
    match parse_instance(&unknown).unwrap_err() {
        HarnessError::Parse { line, reason } => {
            assert_eq!(line, Some(2));
            assert!(reason.contains("colour"), "{reason}");
        }
        e => panic!("{e:?}"),
    }

    let bad_fn = good.replacen(
        "\"kind\": \"cap\", \"c\": \"inf\"",
        "\"kind\": \"cap\", \"k\": 1",
        1,
    );
    match parse_instance(&bad_fn).unwrap_err() {
        HarnessError::Parse { line, .. } => assert_eq!(line, Some(8)),
        e => panic!("{e:?}"),
    }

    let wrong_monoid = good.replacen("\"maxcap\"", "\"keyset\"", 1);
    assert!(matches!(
        parse_instance(&wrong_monoid).unwrap_err(),
        HarnessError::Parse { line: None, .. }
    ));

    let bad_word = good.replacen("\"value\": 5", "\"value\": \"lots\"", 2);
    assert!(matches!(
        parse_instance(&bad_word).unwrap_err(),
        HarnessError::Parse { line: Some(_), .. }
    ));
}

#[test]
fn list_graph_reproduces_fig2() {
    let spec = |key: i64, mark: bool, next: u32| ListNodeSpec {
        key: ExtInt::Fin(key),
        mark,
        next: NodeId(next),
    };
    let mut specs = BTreeMap::from([
        (fig2::L, spec(6, false, 2)),
        (fig2::T, spec(7, true, 3)),
        (fig2::R, spec(8, false, 4)),
    ]);
    let root_inflow = KeySet::above(ExtInt::Fin(3));
    assert_eq!(
        list_graph(&specs, fig2::L, root_inflow.clone()).unwrap(),
        fig2::before()
    );
    specs.get_mut(&fig2::L).unwrap().next = fig2::R;
    assert_eq!(list_graph(&specs, fig2::L, root_inflow).unwrap(), fig2::after());
}

#[test]
fn generator_is_deterministic() {
    for op in ListOp::ALL {
        let a = gen_list_update(op, 6, 42).unwrap();
        let b = gen_list_update(op, 6, 42).unwrap();
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
    }
    assert_eq!(list_suite(9, 3), list_suite(9, 3));
    assert!(matches!(
        gen_list_update(ListOp::Mark, 1, 0),
        Err(HarnessError::BadParams(_))
    ));
}

#[test]
fn mark_changes_one_node() {
    for seed in 0..20 {
        let inst = gen_list_update(ListOp::Mark, 5, seed).unwrap();
        assert_eq!(out_diff(&inst.before, &inst.after).unwrap().len(), 1);
    }
}

#[test]
fn insert_footprint() {
    // two list nodes l, r and the fresh node n between them
    let inst = gen_list_update(ListOp::Insert, 2, 9).unwrap();
    let (l, r, n) = (NodeId(1), NodeId(2), NodeId(3));
    let expected = node_set([l, r, n]);
    let res = compute_footprint(&inst.before, &inst.after, MethodTag::New).unwrap();
    assert_eq!(res.footprint, Footprint::Nodes(expected.clone()));

    let all = oracle_footprints(&inst.before, &inst.after, &EnumBudget::default()).unwrap();
    assert_eq!(all, [expected].into());
}

#[test]
fn cyclic_updates_change_the_whole_ring() {
    let inst = gen_cyclic_update(4, 1).unwrap();
    assert!(!inst.before.is_acyclic());
    assert_eq!(&out_diff(&inst.before, &inst.after).unwrap(), inst.before.nodes());
    let res = compute_footprint(&inst.before, &inst.after, MethodTag::New).unwrap();
    assert_eq!(res.nodes(), Some(inst.before.nodes()));
}

#[test]
fn csv_output() {
    let suite = list_suite(3, 1);
    let rows = run_bench(&suite, &MethodTag::ALL, 3);
    assert_eq!(rows.len(), 9);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,method,footprint_size,micros,status"));
    assert_eq!(lines.count(), 9);
    let totals = BenchTotals::of(&rows);
    assert_eq!(
        totals.ok.values().sum::<usize>() + totals.top.values().sum::<usize>(),
        9
    );
}
