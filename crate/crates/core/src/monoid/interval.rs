//! Interval sets over the extended integers `ℤ ∪ {−∞, +∞}`.
//!
//! A [`KeySet`] is kept in canonical form at all times: its intervals are
//! sorted, pairwise disjoint, and never adjacent (adjacent or overlapping
//! intervals are merged on construction). Two key sets are therefore equal as
//! sets exactly when their interval vectors are equal.

use std::fmt;

/// An extended integer. The derived order places `NegInf` below every finite
/// key and `PosInf` above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

impl ExtInt {
    /// The next extended integer, or `None` past `+∞`.
    pub fn succ(self) -> Option<ExtInt> {
        match self {
            ExtInt::NegInf => Some(ExtInt::Fin(i64::MIN)),
            ExtInt::Fin(i64::MAX) => Some(ExtInt::PosInf),
            ExtInt::Fin(k) => Some(ExtInt::Fin(k + 1)),
            ExtInt::PosInf => None,
        }
    }

    /// The previous extended integer, or `None` below `−∞`.
    pub fn pred(self) -> Option<ExtInt> {
        match self {
            ExtInt::NegInf => None,
            ExtInt::Fin(i64::MIN) => Some(ExtInt::NegInf),
            ExtInt::Fin(k) => Some(ExtInt::Fin(k - 1)),
            ExtInt::PosInf => Some(ExtInt::Fin(i64::MAX)),
        }
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::Fin(k) => write!(f, "{k}"),
            ExtInt::PosInf => f.write_str("inf"),
        }
    }
}

/// A canonical set of extended integers represented by inclusive intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct KeySet {
    intervals: Vec<(ExtInt, ExtInt)>,
}

impl KeySet {
    pub fn empty() -> Self {
        KeySet {
            intervals: Vec::new(),
        }
    }

    /// Every extended integer, `[−∞, +∞]`.
    pub fn full() -> Self {
        KeySet {
            intervals: vec![(ExtInt::NegInf, ExtInt::PosInf)],
        }
    }

    /// The inclusive interval `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(lo: ExtInt, hi: ExtInt) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    /// All finite keys, `ℤ` without the two sentinels.
    pub fn integers() -> Self {
        Self::interval(ExtInt::Fin(i64::MIN), ExtInt::Fin(i64::MAX))
    }

    /// Keys strictly above `k`, up to and including `+∞`.
    pub fn above(k: ExtInt) -> Self {
        match k.succ() {
            Some(lo) => Self::interval(lo, ExtInt::PosInf),
            None => Self::empty(),
        }
    }

    pub fn singleton(k: ExtInt) -> Self {
        Self::interval(k, k)
    }

    /// Builds the canonical set covering the union of the given inclusive
    /// intervals. Inverted intervals are dropped.
    pub fn from_intervals<I>(intervals: I) -> Self
    where
        I: IntoIterator<Item = (ExtInt, ExtInt)>,
    {
        let mut raw: Vec<(ExtInt, ExtInt)> = intervals.into_iter().filter(|(lo, hi)| lo <= hi).collect();
        raw.sort();
        let mut out: Vec<(ExtInt, ExtInt)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            if let Some(last) = out.last_mut() {
                // merge when overlapping or adjacent
                let touches = match last.1.succ() {
                    Some(next) => lo <= next,
                    None => true,
                };
                if touches {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            out.push((lo, hi));
        }
        KeySet { intervals: out }
    }

    pub fn from_points<I>(points: I) -> Self
    where
        I: IntoIterator<Item = ExtInt>,
    {
        Self::from_intervals(points.into_iter().map(|k| (k, k)))
    }

    pub fn intervals(&self) -> &[(ExtInt, ExtInt)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals == [(ExtInt::NegInf, ExtInt::PosInf)]
    }

    pub fn contains(&self, k: ExtInt) -> bool {
        // intervals are sorted by lower bound
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= k);
        idx > 0 && self.intervals[idx - 1].1 >= k
    }

    pub fn union(&self, other: &KeySet) -> KeySet {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        Self::from_intervals(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn intersection(&self, other: &KeySet) -> KeySet {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // disjoint non-adjacent inputs give disjoint non-adjacent output
        KeySet { intervals: out }
    }

    /// Keys of the universe `[−∞, +∞]` not in `self`.
    pub fn complement(&self) -> KeySet {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Some(ExtInt::NegInf);
        for &(lo, hi) in &self.intervals {
            if let Some(start) = cursor {
                if start < lo {
                    // lo > start >= −∞, so lo has a predecessor
                    out.push((start, lo.pred().expect("lo above start")));
                }
            }
            cursor = hi.succ();
        }
        if let Some(start) = cursor {
            out.push((start, ExtInt::PosInf));
        }
        KeySet { intervals: out }
    }

    pub fn difference(&self, other: &KeySet) -> KeySet {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &KeySet) -> bool {
        self.difference(other).is_empty()
    }

    /// Number of keys when the set only contains finitely many, counting the
    /// sentinels as one key each.
    pub fn finite_len(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for &(lo, hi) in &self.intervals {
            let n = match (lo, hi) {
                (ExtInt::NegInf, ExtInt::NegInf) | (ExtInt::PosInf, ExtInt::PosInf) => 1,
                (ExtInt::Fin(a), ExtInt::Fin(b)) => (i128::from(b) - i128::from(a) + 1) as u128,
                _ => return None,
            };
            total += n;
        }
        Some(total)
    }
}

impl fmt::Display for KeySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            if lo == hi {
                write!(f, "{{{lo}}}")?;
            } else {
                write!(f, "[{lo},{hi}]")?;
            }
        }
        Ok(())
    }
}
