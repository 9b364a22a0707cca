//! Brute-force ground truth: contextual equivalence and footprints decided by
//! enumerating every inflow below a bound, and the separation-algebra laws
//! checked on random graphs.
//!
//! Enumeration is exact, never sampled:
//!
//! - Keyset values are enumerated over a finite set of representative keys.
//!   By default the representatives are derived from the graphs themselves:
//!   every interval endpoint of every edge function and inflow value splits
//!   the key axis into atoms, and keys in the same atom are indistinguishable
//!   by any flow computation, since keyset flows act on each key
//!   independently. One key per atom therefore decides equivalence.
//! - Counting and max-capacity values below a finite bound are enumerated in
//!   full. Below `∞` the values `0..=m` and `∞` are used, with `m` raised past
//!   every finite capacity and inflow in the graphs so that every place where
//!   two edge functions can first differ is visited.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::graph::{ComposeError, FlowGraph, GraphError, InflowMap, NodeSet};
use crate::monoid::{EdgeFn, ExtInt, ExtNat, FlowValue, KeySet, MonoidError, MonoidTag};
use crate::random::{self, Shape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration needs {needed} inflows, budget allows {budget}")]
    Infeasible { needed: String, budget: u64 },
    #[error("{nodes} nodes exceed the subset budget of {max}")]
    TooManyNodes { nodes: usize, max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Which keys a keyset enumeration ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyUniverse {
    /// One representative per atom of the graphs under test.
    Atoms,
    Explicit(BTreeSet<ExtInt>),
}

impl KeyUniverse {
    /// `{−∞, 0..=7, +∞}`.
    pub fn small() -> KeyUniverse {
        let mut keys: BTreeSet<ExtInt> = (0..=7).map(ExtInt::Fin).collect();
        keys.insert(ExtInt::NegInf);
        keys.insert(ExtInt::PosInf);
        KeyUniverse::Explicit(keys)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumBudget {
    pub keys: KeyUniverse,
    /// Largest finite value tried below `∞`, before raising.
    pub max_finite: u64,
    pub max_inflows: u64,
    /// Largest node set whose subsets are enumerated.
    pub max_nodes: usize,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            keys: KeyUniverse::Atoms,
            max_finite: 8,
            max_inflows: 1 << 16,
            max_nodes: 8,
        }
    }
}

fn keysets_of(h: &FlowGraph) -> impl Iterator<Item = &KeySet> {
    let edges = h.edges().values().filter_map(|f| match f {
        EdgeFn::Intersect(s) => Some(s),
        _ => None,
    });
    let inflow = h.inflow().values().filter_map(|v| match v {
        FlowValue::Keyset(s) => Some(s),
        _ => None,
    });
    edges.chain(inflow)
}

fn nats_of(h: &FlowGraph) -> impl Iterator<Item = u64> + '_ {
    let edges = h.edges().values().filter_map(|f| match f {
        EdgeFn::Cap(ExtNat::Fin(c)) | EdgeFn::Scale(ExtNat::Fin(c)) => Some(*c),
        _ => None,
    });
    let inflow = h.inflow().values().filter_map(|v| match v {
        FlowValue::Counting(ExtNat::Fin(n)) | FlowValue::MaxCap(ExtNat::Fin(n)) => Some(*n),
        _ => None,
    });
    edges.chain(inflow)
}

/// The first key of every atom cut out by the interval endpoints of `sets`.
pub fn atom_representatives<'a, I>(sets: I) -> BTreeSet<ExtInt>
where
    I: IntoIterator<Item = &'a KeySet>,
{
    let mut reps = BTreeSet::from([ExtInt::NegInf]);
    for s in sets {
        for &(lo, hi) in s.intervals() {
            reps.insert(lo);
            if let Some(next) = hi.succ() {
                reps.insert(next);
            }
        }
    }
    reps
}

impl EnumBudget {
    /// Fixes the key universe and value bound for a family of graphs.
    pub fn resolve(&self, graphs: &[&FlowGraph]) -> EnumBudget {
        let keys = match &self.keys {
            KeyUniverse::Atoms => {
                KeyUniverse::Explicit(atom_representatives(graphs.iter().flat_map(|h| keysets_of(h))))
            }
            explicit => explicit.clone(),
        };
        let largest = graphs.iter().flat_map(|h| nats_of(h)).max().unwrap_or(0);
        EnumBudget {
            keys,
            max_finite: self.max_finite.max(largest.saturating_add(1)),
            ..self.clone()
        }
    }
}

/// Every value `v ≤ bound` the enumeration visits.
fn values_below(bound: &FlowValue, budget: &EnumBudget) -> Result<Vec<FlowValue>, OracleError> {
    let nats = |n: &ExtNat| -> Vec<ExtNat> {
        match n {
            ExtNat::Fin(n) => (0..=*n).map(ExtNat::Fin).collect(),
            ExtNat::Inf => (0..=budget.max_finite)
                .map(ExtNat::Fin)
                .chain([ExtNat::Inf])
                .collect(),
        }
    };
    let too_many = |needed: String| OracleError::Infeasible {
        needed,
        budget: budget.max_inflows,
    };
    Ok(match bound {
        FlowValue::Counting(n) | FlowValue::MaxCap(n) => {
            if let ExtNat::Fin(n) = n {
                if *n >= budget.max_inflows {
                    return Err(too_many(format!("{}", n + 1)));
                }
            }
            let wrap = |v: ExtNat| match bound {
                FlowValue::Counting(_) => FlowValue::Counting(v),
                _ => FlowValue::MaxCap(v),
            };
            nats(n).into_iter().map(wrap).collect()
        }
        FlowValue::Keyset(s) => {
            let keys = match &budget.keys {
                KeyUniverse::Explicit(keys) => keys.clone(),
                KeyUniverse::Atoms => atom_representatives([s]),
            };
            let points: Vec<ExtInt> = keys.into_iter().filter(|k| s.contains(*k)).collect();
            if points.len() >= 64 || (1u64 << points.len()) > budget.max_inflows {
                return Err(too_many(format!("2^{}", points.len())));
            }
            (0..1u64 << points.len())
                .map(|mask| {
                    let chosen = points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1);
                    FlowValue::Keyset(KeySet::from_points(chosen.map(|(_, k)| *k)))
                })
                .collect()
        }
    })
}

/// All inflow mappings pointwise below `in0`, zero entries dropped.
pub fn enum_inflows_below(in0: &InflowMap, budget: &EnumBudget) -> Result<Vec<InflowMap>, OracleError> {
    let choices: Vec<(_, Vec<FlowValue>)> = in0
        .iter()
        .map(|(k, v)| Ok((*k, values_below(v, budget)?)))
        .collect::<Result<_, OracleError>>()?;
    let mut total: u64 = 1;
    for (_, c) in &choices {
        total = total.saturating_mul(c.len() as u64);
        if total > budget.max_inflows {
            return Err(OracleError::Infeasible {
                needed: format!("more than {}", budget.max_inflows),
                budget: budget.max_inflows,
            });
        }
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut digits = vec![0usize; choices.len()];
    loop {
        out.push(
            choices
                .iter()
                .zip(&digits)
                .filter(|((_, c), &d)| !c[d].is_zero())
                .map(|((k, c), &d)| (*k, c[d].clone()))
                .collect(),
        );
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(out);
            }
            digits[i] += 1;
            if digits[i] < choices[i].1.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn comparable(h1: &FlowGraph, h2: &FlowGraph) -> bool {
    h1.tag() == h2.tag() && h1.nodes() == h2.nodes() && h1.inflow() == h2.inflow()
}

/// Contextual equivalence: same nodes, same inflow, and equal outflow under
/// every inflow below it.
pub fn oracle_ctx_equiv(h1: &FlowGraph, h2: &FlowGraph, budget: &EnumBudget) -> Result<bool, OracleError> {
    if !comparable(h1, h2) {
        return Ok(false);
    }
    let budget = budget.resolve(&[h1, h2]);
    let inflows = match enum_inflows_below(h1.inflow(), &budget) {
        Err(OracleError::Infeasible { .. }) => single_entry_inflows(h1.inflow(), &budget)?,
        other => other?,
    };
    for inflow in inflows {
        if h1.transfer(&inflow)? != h2.transfer(&inflow)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inflows below `in0` with at most one nonzero entry; keyset entries are
/// further cut down to single keys.
///
/// Every edge function distributes over sums, so the transfer function is
/// additive in the inflow: its value at `in` is the sum of its values at the
/// single-entry (single-key) parts of `in`. Two graphs that agree on this
/// family therefore agree on every inflow below `in0`, which makes it an
/// exact substitute when the full product is too large.
pub fn single_entry_inflows(in0: &InflowMap, budget: &EnumBudget) -> Result<Vec<InflowMap>, OracleError> {
    let mut out = vec![InflowMap::new()];
    for (e, bound) in in0 {
        let values = match bound {
            FlowValue::Keyset(s) => {
                let keys = match &budget.keys {
                    KeyUniverse::Explicit(keys) => keys.clone(),
                    KeyUniverse::Atoms => atom_representatives([s]),
                };
                keys.into_iter()
                    .filter(|k| s.contains(*k))
                    .map(|k| FlowValue::Keyset(KeySet::singleton(k)))
                    .collect()
            }
            _ => values_below(bound, budget)?,
        };
        out.extend(
            values
                .into_iter()
                .filter(|v| !v.is_zero())
                .map(|v| InflowMap::from([(*e, v)])),
        );
        if out.len() as u64 > budget.max_inflows {
            return Err(OracleError::Infeasible {
                needed: format!("more than {}", budget.max_inflows),
                budget: budget.max_inflows,
            });
        }
    }
    Ok(out)
}

/// Both clauses of the footprint definition for `y`, decided by enumeration.
pub fn oracle_is_footprint(
    h1: &FlowGraph,
    h2: &FlowGraph,
    y: &NodeSet,
    budget: &EnumBudget,
) -> Result<bool, OracleError> {
    if !comparable(h1, h2) {
        return Ok(false);
    }
    let rest: NodeSet = h1.nodes().difference(y).copied().collect();
    if h1.restrict(&rest)? != h2.restrict(&rest)? {
        return Ok(false);
    }
    oracle_ctx_equiv(&h1.restrict(y)?, &h2.restrict(y)?, budget)
}

/// Every footprint of `(h1, h2)`.
pub fn oracle_footprints(
    h1: &FlowGraph,
    h2: &FlowGraph,
    budget: &EnumBudget,
) -> Result<BTreeSet<NodeSet>, OracleError> {
    if !comparable(h1, h2) {
        return Ok(BTreeSet::new());
    }
    let nodes: Vec<_> = h1.nodes().iter().copied().collect();
    if nodes.len() > budget.max_nodes {
        return Err(OracleError::TooManyNodes {
            nodes: nodes.len(),
            max: budget.max_nodes,
        });
    }
    // restrictions only carry values computed from the originals, so atoms
    // of the originals serve every subset
    let budget = budget.resolve(&[h1, h2]);
    let mut found = BTreeSet::new();
    for mask in 0u32..1 << nodes.len() {
        let y: NodeSet = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| *x)
            .collect();
        if oracle_is_footprint(h1, h2, &y, &budget)? {
            found.insert(y);
        }
    }
    Ok(found)
}

/// One law violation with the graphs that exhibit it.
#[derive(Debug, Clone)]
pub struct LawFailure {
    pub law: &'static str,
    pub detail: String,
    pub graphs: Vec<FlowGraph>,
}

#[derive(Debug, Clone, Default)]
pub struct LawReport {
    /// Law name and number of instances checked.
    pub checked: BTreeMap<&'static str, usize>,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub const LAWS: [&'static str; 3] = ["unit", "commutativity", "associativity"];

    pub fn passed(&self, law: &str) -> bool {
        !self.failures.iter().any(|f| f.law == law)
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, law: &'static str, detail: String, graphs: &[&FlowGraph]) {
        self.failures.push(LawFailure {
            law,
            detail,
            graphs: graphs.iter().map(|h| (*h).clone()).collect(),
        });
    }

    /// Checks the laws on one triple.
    pub fn check_triple(&mut self, h1: &FlowGraph, h2: &FlowGraph, h3: &FlowGraph) {
        for h in [h1, h2, h3] {
            *self.checked.entry("unit").or_default() += 1;
            let unit = FlowGraph::empty(h.tag());
            let right = h.compose(&unit);
            let left = unit.compose(h);
            if right.as_ref() != Ok(h) || left.as_ref() != Ok(h) {
                self.fail("unit", "h * h∅ or h∅ * h differs from h".into(), &[h]);
            }
        }

        *self.checked.entry("commutativity").or_default() += 1;
        let ab = h1.compose(h2);
        let ba = h2.compose(h1);
        match (&ab, &ba) {
            (Ok(x), Ok(y)) if x == y => {}
            (Err(x), Err(y)) if x.is_undefined() && y.is_undefined() => {}
            _ => self.fail(
                "commutativity",
                format!("h1*h2 = {}, h2*h1 = {}", outcome(&ab), outcome(&ba)),
                &[h1, h2],
            ),
        }

        *self.checked.entry("associativity").or_default() += 1;
        let left = ab.and_then(|g| g.compose(h3));
        let right = h2.compose(h3).and_then(|g| h1.compose(&g));
        match (&left, &right) {
            (Ok(x), Ok(y)) if x == y => {}
            (Err(x), Err(y)) if x.is_undefined() && y.is_undefined() => {}
            _ => self.fail(
                "associativity",
                format!(
                    "(h1*h2)*h3 = {}, h1*(h2*h3) = {}",
                    outcome(&left),
                    outcome(&right)
                ),
                &[h1, h2, h3],
            ),
        }
    }
}

fn outcome(r: &Result<FlowGraph, ComposeError>) -> String {
    match r {
        Ok(g) => format!("defined on {} nodes", g.nodes().len()),
        Err(e) => format!("undefined ({e})"),
    }
}

/// Checks unit, commutativity and associativity (with definedness) on
/// `samples` random triples. Half the triples are restrictions of one graph
/// to a partition, which always compose; the rest are drawn independently
/// and mostly do not.
pub fn check_separation_laws<R: Rng + ?Sized>(tag: MonoidTag, samples: usize, rng: &mut R) -> LawReport {
    let mut report = LawReport::default();
    let shape = Shape::default();
    let small = Shape::default().nodes(0, 3);
    for i in 0..samples {
        if i % 2 == 0 {
            if let Some([a, b, c]) = random::random_compatible_triple(tag, &shape, rng) {
                report.check_triple(&a, &b, &c);
            }
        } else {
            let [a, b, c] = [0, 1, 2].map(|_| offset(&random::random_graph(tag, &small, rng), rng));
            report.check_triple(&a, &b, &c);
        }
    }
    report
}

/// Moves the nodes of `h` into a random block of ten ids and points its
/// external edges and inflow at ids of the other blocks, so independently
/// drawn graphs rarely overlap yet may connect.
fn offset<R: Rng + ?Sized>(h: &FlowGraph, rng: &mut R) -> FlowGraph {
    use crate::graph::NodeId;
    use rand::RngExt;
    let own = rng.random_range(0..3u32);
    let other = (own + rng.random_range(1..3u32)) % 3;
    let map = |x: NodeId| {
        if h.contains(x) {
            NodeId(10 * own + x.0)
        } else {
            NodeId(10 * other + 1 + x.0 % 10)
        }
    };
    let tag = h.tag();
    let nodes: Vec<_> = h.nodes().iter().map(|x| map(*x)).collect();
    let edges: Vec<_> = h
        .edges()
        .iter()
        .map(|((a, b), f)| ((map(*a), map(*b)), f.clone()))
        .collect();
    let inflow: Vec<_> = h
        .inflow()
        .iter()
        .map(|((a, b), v)| ((map(*a), map(*b)), v.clone()))
        .collect();
    FlowGraph::new(tag, nodes, edges, inflow).expect("blocks are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{node_set, NodeId};
    use crate::testing::{self, fig4, R, U, V};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_counts() {
        let budget = EnumBudget {
            keys: KeyUniverse::Explicit([4, 5].map(ExtInt::Fin).into()),
            ..EnumBudget::default()
        };
        let a = (NodeId(0), NodeId(1));
        let b = (NodeId(0), NodeId(2));
        let one = InflowMap::from([(a, FlowValue::Keyset(KeySet::above(ExtInt::Fin(3))))]);
        assert_eq!(enum_inflows_below(&one, &budget).unwrap().len(), 4);

        let count = InflowMap::from([(a, FlowValue::count(2))]);
        assert_eq!(enum_inflows_below(&count, &budget).unwrap().len(), 3);

        let two = InflowMap::from([(a, FlowValue::count(1)), (b, FlowValue::count(2))]);
        let all = enum_inflows_below(&two, &budget).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.contains(&InflowMap::new()));
        assert!(all.contains(&two));

        let tight = EnumBudget {
            max_inflows: 5,
            ..budget
        };
        assert!(matches!(
            enum_inflows_below(&two, &tight),
            Err(OracleError::Infeasible { .. })
        ));
    }

    #[test]
    fn single_entry_family() {
        let budget = EnumBudget {
            keys: KeyUniverse::Explicit([1, 2, 9].map(ExtInt::Fin).into()),
            ..EnumBudget::default()
        };
        let low = FlowValue::Keyset(KeySet::interval(ExtInt::Fin(0), ExtInt::Fin(5)));
        let in0 = InflowMap::from([
            ((NodeId(0), NodeId(1)), low.clone()),
            ((NodeId(0), NodeId(2)), low),
        ]);
        // the empty inflow, then keys 1 and 2 at either entry
        assert_eq!(single_entry_inflows(&in0, &budget).unwrap().len(), 5);
    }

    #[test]
    fn atoms_split_at_endpoints() {
        let s = KeySet::interval(ExtInt::Fin(2), ExtInt::Fin(5));
        let reps = atom_representatives([&s]);
        assert_eq!(reps, [ExtInt::NegInf, ExtInt::Fin(2), ExtInt::Fin(6)].into());
    }

    #[test]
    fn ctx_equiv_examples() {
        let (h, h2) = (testing::fig1_whole(), testing::fig3_after());
        let budget = EnumBudget::default();
        let ruv = node_set([R, U, V]);
        assert!(oracle_ctx_equiv(&h.restrict(&ruv).unwrap(), &h2.restrict(&ruv).unwrap(), &budget).unwrap());
        assert!(oracle_ctx_equiv(&h, &h, &budget).unwrap());
        let r = node_set([R]);
        assert!(!oracle_ctx_equiv(&h.restrict(&r).unwrap(), &h2.restrict(&r).unwrap(), &budget).unwrap());
    }

    #[test]
    fn footprint_sets() {
        let budget = EnumBudget::default();
        let (g1, g2) = (fig4::before(), fig4::after());
        let fp = oracle_footprints(&g1, &g2, &budget).unwrap();
        assert!(fp.contains(&node_set([fig4::X, fig4::Y, fig4::Z, fig4::U])));
        assert!(fp.contains(g1.nodes()));

        let fp = oracle_footprints(&g1, &g1, &budget).unwrap();
        assert_eq!(fp.len(), 1 << g1.nodes().len());

        let (h, h2) = (testing::fig1_whole(), testing::fig3_after());
        let fp = oracle_footprints(&h, &h2, &budget).unwrap();
        assert!(fp.contains(&node_set([R, U, V])));
        assert!(!fp.contains(&node_set([R])));
    }

    #[test]
    fn laws_on_figure_graphs() {
        let mut report = LawReport::default();
        let unit = FlowGraph::empty(MonoidTag::Counting);
        report.check_triple(&testing::fig1_left(), &testing::fig1_right(), &unit);
        let (a, b) = testing::fig1b_pair();
        report.check_triple(&a, &b, &unit);
        assert!(report.is_clean(), "{:?}", report.failures);
    }

    #[test]
    fn random_laws_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for tag in MonoidTag::ALL {
            let report = check_separation_laws(tag, 100, &mut rng);
            assert!(report.is_clean(), "{tag}: {:?}", report.failures.first());
        }
    }
}
