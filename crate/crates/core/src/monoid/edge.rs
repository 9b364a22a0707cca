use std::fmt;

use super::{ExtInt, ExtNat, FlowValue, KeySet, MonoidError, MonoidTag};

/// A symbolic edge function `M → M` in canonical form.
///
/// Each monoid has one parametric family, closed under composition and
/// pointwise sum:
///
/// | monoid   | form           | meaning       | zero         | identity          |
/// |----------|----------------|---------------|--------------|-------------------|
/// | counting | `Scale(k)`     | `m ↦ k·m`     | `Scale(0)`   | `Scale(1)`        |
/// | keyset   | `Intersect(S)` | `m ↦ m ∩ S`   | `Intersect ∅`| `Intersect(full)` |
/// | maxcap   | `Cap(c)`       | `m ↦ min(m,c)`| `Cap(0)`     | `Cap(∞)`          |
///
/// All of them are continuous and distributive. Equality of two `EdgeFn`s is
/// equality of the functions they denote.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeFn {
    Scale(ExtNat),
    Intersect(KeySet),
    Cap(ExtNat),
}

impl EdgeFn {
    pub fn zero(tag: MonoidTag) -> EdgeFn {
        match tag {
            MonoidTag::Counting => EdgeFn::Scale(ExtNat::ZERO),
            MonoidTag::Keyset => EdgeFn::Intersect(KeySet::empty()),
            MonoidTag::MaxCap => EdgeFn::Cap(ExtNat::ZERO),
        }
    }

    pub fn identity(tag: MonoidTag) -> EdgeFn {
        match tag {
            MonoidTag::Counting => EdgeFn::Scale(ExtNat::ONE),
            MonoidTag::Keyset => EdgeFn::Intersect(KeySet::full()),
            MonoidTag::MaxCap => EdgeFn::Cap(ExtNat::Inf),
        }
    }

    /// `λ_k`: removes every key `≤ k`. `λ_{−∞}` removes only `−∞`.
    pub fn keyset_lambda(k: ExtInt) -> EdgeFn {
        EdgeFn::Intersect(KeySet::above(k))
    }

    pub fn tag(&self) -> MonoidTag {
        match self {
            EdgeFn::Scale(_) => MonoidTag::Counting,
            EdgeFn::Intersect(_) => MonoidTag::Keyset,
            EdgeFn::Cap(_) => MonoidTag::MaxCap,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            EdgeFn::Scale(k) => k.is_zero(),
            EdgeFn::Intersect(s) => s.is_empty(),
            EdgeFn::Cap(c) => c.is_zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == EdgeFn::identity(self.tag())
    }

    /// `f(m) ≤ m` for all `m`.
    pub fn is_decreasing(&self) -> bool {
        match self {
            EdgeFn::Scale(k) => *k <= ExtNat::ONE,
            EdgeFn::Intersect(_) | EdgeFn::Cap(_) => true,
        }
    }

    pub fn apply(&self, m: &FlowValue) -> Result<FlowValue, MonoidError> {
        Ok(match (self, m) {
            (EdgeFn::Scale(k), FlowValue::Counting(n)) => FlowValue::Counting(k.mul(*n)),
            (EdgeFn::Intersect(s), FlowValue::Keyset(n)) => FlowValue::Keyset(n.intersection(s)),
            (EdgeFn::Cap(c), FlowValue::MaxCap(n)) => FlowValue::MaxCap(*n.min(c)),
            _ => return Err(self.mismatch(m.tag())),
        })
    }

    /// Sequential composition: the result maps `m` to `next(self(m))`.
    pub fn then(&self, next: &EdgeFn) -> Result<EdgeFn, MonoidError> {
        Ok(match (self, next) {
            (EdgeFn::Scale(a), EdgeFn::Scale(b)) => EdgeFn::Scale(a.mul(*b)),
            (EdgeFn::Intersect(a), EdgeFn::Intersect(b)) => EdgeFn::Intersect(a.intersection(b)),
            (EdgeFn::Cap(a), EdgeFn::Cap(b)) => EdgeFn::Cap(*a.min(b)),
            _ => return Err(self.mismatch(next.tag())),
        })
    }

    /// Pointwise sum `m ↦ self(m) + other(m)`.
    pub fn sum(&self, other: &EdgeFn) -> Result<EdgeFn, MonoidError> {
        Ok(match (self, other) {
            (EdgeFn::Scale(a), EdgeFn::Scale(b)) => EdgeFn::Scale(a.add(*b)),
            (EdgeFn::Intersect(a), EdgeFn::Intersect(b)) => EdgeFn::Intersect(a.union(b)),
            (EdgeFn::Cap(a), EdgeFn::Cap(b)) => EdgeFn::Cap(*a.max(b)),
            _ => return Err(self.mismatch(other.tag())),
        })
    }

    /// Pointwise order: `self(m) ≤ other(m)` for every `m`.
    pub fn leq(&self, other: &EdgeFn) -> Result<bool, MonoidError> {
        Ok(match (self, other) {
            (EdgeFn::Scale(a), EdgeFn::Scale(b)) | (EdgeFn::Cap(a), EdgeFn::Cap(b)) => a <= b,
            (EdgeFn::Intersect(a), EdgeFn::Intersect(b)) => a.is_subset(b),
            _ => return Err(self.mismatch(other.tag())),
        })
    }

    /// Decides whether `self(m) = other(m)` for every `m ≤ bound`.
    ///
    /// For `Scale` an unbounded down-set contains `1`, which separates any two
    /// distinct factors, so only a zero bound makes distinct factors agree.
    pub fn eq_below(&self, other: &EdgeFn, bound: &FlowValue) -> Result<bool, MonoidError> {
        Ok(match (self, other, bound) {
            (EdgeFn::Scale(a), EdgeFn::Scale(b), FlowValue::Counting(n)) => n.is_zero() || a == b,
            (EdgeFn::Intersect(a), EdgeFn::Intersect(b), FlowValue::Keyset(n)) => {
                a.intersection(n) == b.intersection(n)
            }
            (EdgeFn::Cap(a), EdgeFn::Cap(b), FlowValue::MaxCap(n)) => a.min(n) == b.min(n),
            _ => {
                let tag = if self.tag() != other.tag() {
                    other.tag()
                } else {
                    bound.tag()
                };
                return Err(self.mismatch(tag));
            }
        })
    }

    fn mismatch(&self, other: MonoidTag) -> MonoidError {
        MonoidError::TagMismatch {
            left: self.tag(),
            right: other,
        }
    }
}

impl fmt::Display for EdgeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeFn::Scale(k) => write!(f, "scale({k})"),
            EdgeFn::Intersect(s) => write!(f, "intersect({s})"),
            EdgeFn::Cap(c) => write!(f, "cap({c})"),
        }
    }
}

/// Which structural properties a family of edge functions has. Always derived
/// from the functions themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FnClass {
    pub distributive: bool,
    pub decreasing: bool,
    pub idempotent_addition: bool,
}

impl FnClass {
    pub fn of<'a, I>(tag: MonoidTag, fns: I) -> FnClass
    where
        I: IntoIterator<Item = &'a EdgeFn>,
    {
        FnClass {
            // every constructible form is distributive
            distributive: true,
            decreasing: fns.into_iter().all(EdgeFn::is_decreasing),
            idempotent_addition: tag.is_idempotent(),
        }
    }
}
