//! The JSON instance format (see `docs/format.md`).
//!
//! Values are decoded by hand-written visitors rather than untagged or
//! internally tagged enums so that every malformed value is reported with
//! the line it sits on.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::graph::{FlowGraph, NodeId};
use crate::monoid::{EdgeFn, ExtInt, ExtNat, FlowValue, KeySet, MonoidTag};

use super::{HarnessError, Instance};

/// `n` or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Nat(pub ExtNat);

/// An interval endpoint: an integer, `"-inf"` or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct End(pub ExtInt);

/// `[lo, hi]` or a string such as `"(3,inf]"`, `"[0,5)"` or `"{4}"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Interval(pub ExtInt, pub ExtInt);

/// A list of intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Set(pub KeySet);

/// A flow value of any monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Value {
    Nat(ExtNat),
    Set(KeySet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Func(pub RawFn);

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RawFn {
    Scale(ExtNat),
    Intersect(KeySet),
    Cap(ExtNat),
    Lambda(ExtInt),
}

fn parse_nat_word<E: de::Error>(s: &str) -> Result<ExtNat, E> {
    match s {
        "inf" => Ok(ExtNat::Inf),
        _ => Err(E::invalid_value(
            de::Unexpected::Str(s),
            &"a natural number or \"inf\"",
        )),
    }
}

fn parse_end_word(s: &str) -> Option<ExtInt> {
    match s.trim() {
        "-inf" => Some(ExtInt::NegInf),
        "inf" | "+inf" => Some(ExtInt::PosInf),
        t => t.parse().ok().map(ExtInt::Fin),
    }
}

/// `(a,b]`-style interval notation; `{k}` is a single key.
fn parse_interval_str(s: &str) -> Option<(ExtInt, ExtInt)> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        let k = parse_end_word(inner)?;
        return Some((k, k));
    }
    let open_lo = match s.chars().next()? {
        '[' => false,
        '(' => true,
        _ => return None,
    };
    let open_hi = match s.chars().last()? {
        ']' => false,
        ')' => true,
        _ => return None,
    };
    let (a, b) = s[1..s.len() - 1].split_once(',')?;
    let mut lo = parse_end_word(a)?;
    let mut hi = parse_end_word(b)?;
    if open_lo {
        lo = lo.succ()?;
    }
    if open_hi {
        hi = hi.pred()?;
    }
    Some((lo, hi))
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Nat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a natural number or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Nat, E> {
                Ok(Nat(ExtNat::Fin(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Nat, E> {
                parse_nat_word(v).map(Nat)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ExtNat::Fin(n) => s.serialize_u64(n),
            ExtNat::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for End {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = End;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer, \"-inf\" or \"inf\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<End, E> {
                Ok(End(ExtInt::Fin(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<End, E> {
                i64::try_from(v)
                    .map(|v| End(ExtInt::Fin(v)))
                    .map_err(|_| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<End, E> {
                match v {
                    "-inf" => Ok(End(ExtInt::NegInf)),
                    "inf" => Ok(End(ExtInt::PosInf)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for End {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ExtInt::NegInf => s.serialize_str("-inf"),
            ExtInt::Fin(k) => s.serialize_i64(k),
            ExtInt::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Interval;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an interval [lo, hi] or a string such as \"(3,inf]\"")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Interval, A::Error> {
                let lo: End = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let hi: End = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Interval(lo.0, hi.0))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Interval, E> {
                parse_interval_str(v)
                    .map(|(lo, hi)| Interval(lo, hi))
                    .ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for Set {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts: Vec<Interval> = Vec::deserialize(d)?;
        Ok(Set(KeySet::from_intervals(
            parts.into_iter().map(|Interval(a, b)| (a, b)),
        )))
    }
}

impl Serialize for Set {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.intervals().len()))?;
        for &(lo, hi) in self.0.intervals() {
            seq.serialize_element(&[End(lo), End(hi)])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Value;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\", or a list of intervals")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value::Nat(ExtNat::Fin(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                parse_nat_word(v).map(Value::Nat)
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
                let mut parts = Vec::new();
                while let Some(Interval(a, b)) = seq.next_element()? {
                    parts.push((a, b));
                }
                Ok(Value::Set(KeySet::from_intervals(parts)))
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for Func {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Func;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an edge function {\"kind\": scale|intersect|cap|lambda, …}")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Func, A::Error> {
                let mut kind: Option<String> = None;
                let mut k: Option<serde_json::Value> = None;
                let mut set: Option<Set> = None;
                let mut c: Option<Nat> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "kind" => kind = Some(map.next_value()?),
                        "k" => k = Some(map.next_value()?),
                        "set" => set = Some(map.next_value()?),
                        "c" => c = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["kind", "k", "set", "c"])),
                    }
                }
                let kind = kind.ok_or_else(|| de::Error::missing_field("kind"))?;
                let only = |ok: bool| -> Result<(), A::Error> {
                    if ok {
                        Ok(())
                    } else {
                        Err(de::Error::custom(format!("unexpected field for kind `{kind}`")))
                    }
                };
                let f = match kind.as_str() {
                    "scale" => {
                        only(set.is_none() && c.is_none())?;
                        let k = k.ok_or_else(|| de::Error::missing_field("k"))?;
                        RawFn::Scale(Nat::deserialize(k).map_err(de::Error::custom)?.0)
                    }
                    "lambda" => {
                        only(set.is_none() && c.is_none())?;
                        let k = k.ok_or_else(|| de::Error::missing_field("k"))?;
                        RawFn::Lambda(End::deserialize(k).map_err(de::Error::custom)?.0)
                    }
                    "intersect" => {
                        only(k.is_none() && c.is_none())?;
                        RawFn::Intersect(set.ok_or_else(|| de::Error::missing_field("set"))?.0)
                    }
                    "cap" => {
                        only(k.is_none() && set.is_none())?;
                        RawFn::Cap(c.ok_or_else(|| de::Error::missing_field("c"))?.0)
                    }
                    other => {
                        return Err(de::Error::unknown_variant(
                            other,
                            &["scale", "intersect", "cap", "lambda"],
                        ))
                    }
                };
                Ok(Func(f))
            }
        }
        d.deserialize_map(V)
    }
}

impl Serialize for Func {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        match &self.0 {
            RawFn::Scale(k) => {
                m.serialize_entry("kind", "scale")?;
                m.serialize_entry("k", &Nat(*k))?;
            }
            RawFn::Lambda(k) => {
                m.serialize_entry("kind", "lambda")?;
                m.serialize_entry("k", &End(*k))?;
            }
            RawFn::Intersect(set) => {
                m.serialize_entry("kind", "intersect")?;
                m.serialize_entry("set", &Set(set.clone()))?;
            }
            RawFn::Cap(c) => {
                m.serialize_entry("kind", "cap")?;
                m.serialize_entry("c", &Nat(*c))?;
            }
        }
        m.end()
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Nat(n) => Nat(*n).serialize(s),
            Value::Set(k) => Set(k.clone()).serialize(s),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawEdge {
    src: u32,
    dst: u32,
    #[serde(rename = "fn")]
    func: Func,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawInflow {
    src: u32,
    dst: u32,
    value: Value,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawGraph {
    nodes: Vec<u32>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    #[serde(default)]
    inflow: Vec<RawInflow>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    label: String,
    monoid: MonoidTag,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    names: BTreeMap<u32, String>,
    before: RawGraph,
    after: RawGraph,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawComposition {
    label: String,
    left: RawGraph,
    right: RawGraph,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCompositionDoc {
    label: String,
    monoid: MonoidTag,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    names: BTreeMap<u32, String>,
    compositions: Vec<RawComposition>,
}

fn semantic(reason: impl fmt::Display) -> HarnessError {
    HarnessError::Parse {
        line: None,
        reason: reason.to_string(),
    }
}

fn from_json(e: serde_json::Error) -> HarnessError {
    HarnessError::Parse {
        line: (e.line() > 0).then_some(e.line()),
        reason: e.to_string(),
    }
}

fn edge_fn(tag: MonoidTag, raw: &RawFn, at: &str) -> Result<EdgeFn, HarnessError> {
    let f = match (tag, raw) {
        (MonoidTag::Counting, RawFn::Scale(k)) => EdgeFn::Scale(*k),
        (MonoidTag::Keyset, RawFn::Intersect(s)) => EdgeFn::Intersect(s.clone()),
        (MonoidTag::Keyset, RawFn::Lambda(k)) => EdgeFn::keyset_lambda(*k),
        (MonoidTag::MaxCap, RawFn::Cap(c)) => EdgeFn::Cap(*c),
        _ => {
            return Err(semantic(format!(
                "{at}: edge function does not fit the {tag} monoid"
            )))
        }
    };
    Ok(f)
}

fn value(tag: MonoidTag, raw: &Value, at: &str) -> Result<FlowValue, HarnessError> {
    let v = match (tag, raw) {
        (MonoidTag::Counting, Value::Nat(n)) => FlowValue::Counting(*n),
        (MonoidTag::MaxCap, Value::Nat(n)) => FlowValue::MaxCap(*n),
        (MonoidTag::Keyset, Value::Set(s)) => FlowValue::Keyset(s.clone()),
        _ => return Err(semantic(format!("{at}: value does not fit the {tag} monoid"))),
    };
    Ok(v)
}

fn build_graph(tag: MonoidTag, raw: &RawGraph, at: &str) -> Result<FlowGraph, HarnessError> {
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, e) in raw.edges.iter().enumerate() {
        let key = (NodeId(e.src), NodeId(e.dst));
        if edges.iter().any(|(k, _)| *k == key) {
            return Err(semantic(format!(
                "{at}.edges[{i}]: duplicate edge ({}, {})",
                e.src, e.dst
            )));
        }
        edges.push((key, edge_fn(tag, &e.func.0, &format!("{at}.edges[{i}]"))?));
    }
    let mut inflow = Vec::with_capacity(raw.inflow.len());
    for (i, e) in raw.inflow.iter().enumerate() {
        let key = (NodeId(e.src), NodeId(e.dst));
        if inflow.iter().any(|(k, _)| *k == key) {
            return Err(semantic(format!(
                "{at}.inflow[{i}]: duplicate entry ({}, {})",
                e.src, e.dst
            )));
        }
        inflow.push((key, value(tag, &e.value, &format!("{at}.inflow[{i}]"))?));
    }
    FlowGraph::new(tag, raw.nodes.iter().map(|&x| NodeId(x)), edges, inflow)
        .map_err(|e| semantic(format!("{at}: {e}")))
}

fn raw_fn(f: &EdgeFn) -> RawFn {
    match f {
        EdgeFn::Scale(k) => RawFn::Scale(*k),
        EdgeFn::Cap(c) => RawFn::Cap(*c),
        EdgeFn::Intersect(s) => {
            // (k, ∞] is written as λ_k
            if let [(lo, ExtInt::PosInf)] = s.intervals() {
                if let Some(k) = lo.pred() {
                    return RawFn::Lambda(k);
                }
            }
            RawFn::Intersect(s.clone())
        }
    }
}

fn raw_value(v: &FlowValue) -> Value {
    match v {
        FlowValue::Counting(n) | FlowValue::MaxCap(n) => Value::Nat(*n),
        FlowValue::Keyset(s) => Value::Set(s.clone()),
    }
}

pub(crate) fn raw_graph(h: &FlowGraph) -> RawGraph {
    RawGraph {
        nodes: h.nodes().iter().map(|x| x.0).collect(),
        edges: h
            .edges()
            .iter()
            .map(|(&(src, dst), f)| RawEdge {
                src: src.0,
                dst: dst.0,
                func: Func(raw_fn(f)),
            })
            .collect(),
        inflow: h
            .inflow()
            .iter()
            .map(|(&(src, dst), v)| RawInflow {
                src: src.0,
                dst: dst.0,
                value: raw_value(v),
            })
            .collect(),
    }
}

fn names_of(raw: BTreeMap<u32, String>) -> BTreeMap<NodeId, String> {
    raw.into_iter().map(|(k, v)| (NodeId(k), v)).collect()
}

fn raw_names(names: &BTreeMap<NodeId, String>) -> BTreeMap<u32, String> {
    names.iter().map(|(k, v)| (k.0, v.clone())).collect()
}

/// Parses an instance document. Unknown fields are rejected.
pub fn parse_instance(text: &str) -> Result<Instance, HarnessError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(from_json)?;
    let before = build_graph(raw.monoid, &raw.before, "before")?;
    let after = build_graph(raw.monoid, &raw.after, "after")?;
    Ok(Instance::new(raw.label, before, after)?.with_names(names_of(raw.names)))
}

/// The canonical text of an instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let raw = RawInstance {
        label: inst.label.clone(),
        monoid: inst.tag(),
        names: raw_names(&inst.names),
        before: raw_graph(&inst.before),
        after: raw_graph(&inst.after),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("instances serialize");
    text.push('\n');
    text
}

/// A pair of graphs to compose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionCase {
    pub label: String,
    pub left: FlowGraph,
    pub right: FlowGraph,
}

/// A document of composition cases over one monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionDoc {
    pub label: String,
    pub tag: MonoidTag,
    pub names: BTreeMap<NodeId, String>,
    pub cases: Vec<CompositionCase>,
}

impl CompositionDoc {
    pub fn case(&self, label: &str) -> Option<&CompositionCase> {
        self.cases.iter().find(|c| c.label == label)
    }
}

pub fn parse_composition(text: &str) -> Result<CompositionDoc, HarnessError> {
    let raw: RawCompositionDoc = serde_json::from_str(text).map_err(from_json)?;
    let cases = raw
        .compositions
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(CompositionCase {
                label: c.label.clone(),
                left: build_graph(raw.monoid, &c.left, &format!("compositions[{i}].left"))?,
                right: build_graph(raw.monoid, &c.right, &format!("compositions[{i}].right"))?,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(CompositionDoc {
        label: raw.label,
        tag: raw.monoid,
        names: names_of(raw.names),
        cases,
    })
}

pub fn serialize_composition(doc: &CompositionDoc) -> String {
    let raw = RawCompositionDoc {
        label: doc.label.clone(),
        monoid: doc.tag,
        names: raw_names(&doc.names),
        compositions: doc
            .cases
            .iter()
            .map(|c| RawComposition {
                label: c.label.clone(),
                left: raw_graph(&c.left),
                right: raw_graph(&c.right),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("documents serialize");
    text.push('\n');
    text
}

/// A single graph in the instance graph encoding, for witness files.
pub fn serialize_graph(h: &FlowGraph) -> serde_json::Value {
    let mut v = serde_json::to_value(raw_graph(h)).expect("graphs serialize");
    if let serde_json::Value::Object(m) = &mut v {
        m.insert(
            "monoid".into(),
            serde_json::to_value(h.tag()).expect("tags serialize"),
        );
    }
    v
}
