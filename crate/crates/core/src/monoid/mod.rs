//! Flow monoids and their edge-function algebras.
//!
//! Three monoids are built in:
//!
//! * [`MonoidTag::Counting`]: `ℕ ∪ {∞}` under addition (path counting).
//! * [`MonoidTag::Keyset`]: sets of extended integers under union (keyset flow).
//! * [`MonoidTag::MaxCap`]: `ℕ ∪ {∞}` under `max`.
//!
//! In each, `n ≤ m` holds iff `m = n + o` for some `o`, which gives an ω-cpo
//! with least element `0`.

mod edge;
mod interval;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use edge::{EdgeFn, FnClass};
pub use interval::{ExtInt, KeySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid tag mismatch: {left} vs {right}")]
    TagMismatch { left: MonoidTag, right: MonoidTag },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonoidTag {
    Counting,
    Keyset,
    MaxCap,
}

impl MonoidTag {
    pub const ALL: [MonoidTag; 3] = [MonoidTag::Counting, MonoidTag::Keyset, MonoidTag::MaxCap];

    /// `m + m = m` for every `m`.
    pub fn is_idempotent(self) -> bool {
        !matches!(self, MonoidTag::Counting)
    }

    pub fn name(self) -> &'static str {
        match self {
            MonoidTag::Counting => "counting",
            MonoidTag::Keyset => "keyset",
            MonoidTag::MaxCap => "maxcap",
        }
    }
}

impl fmt::Display for MonoidTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MonoidTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "counting" => Ok(MonoidTag::Counting),
            "keyset" => Ok(MonoidTag::Keyset),
            "maxcap" => Ok(MonoidTag::MaxCap),
            other => Err(format!(
                "unknown monoid `{other}` (expected counting|keyset|maxcap)"
            )),
        }
    }
}

/// An extended natural number, `ℕ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Fin(0);
    pub const ONE: ExtNat = ExtNat::Fin(1);

    pub fn is_zero(self) -> bool {
        self == ExtNat::ZERO
    }

    /// Addition with `∞` absorbing.
    ///
    /// Panics if a finite sum overflows `u64`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => {
                ExtNat::Fin(a.checked_add(b).expect("counting value overflow"))
            }
            _ => ExtNat::Inf,
        }
    }

    /// Multiplication with `0 · ∞ = 0`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Fin(0), _) | (_, ExtNat::Fin(0)) => ExtNat::ZERO,
            (ExtNat::Fin(a), ExtNat::Fin(b)) => {
                ExtNat::Fin(a.checked_mul(b).expect("counting value overflow"))
            }
            _ => ExtNat::Inf,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

/// An element of one of the built-in flow monoids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlowValue {
    Counting(ExtNat),
    Keyset(KeySet),
    MaxCap(ExtNat),
}

impl FlowValue {
    pub fn zero(tag: MonoidTag) -> FlowValue {
        match tag {
            MonoidTag::Counting => FlowValue::Counting(ExtNat::ZERO),
            MonoidTag::Keyset => FlowValue::Keyset(KeySet::empty()),
            MonoidTag::MaxCap => FlowValue::MaxCap(ExtNat::ZERO),
        }
    }

    pub fn count(n: u64) -> FlowValue {
        FlowValue::Counting(ExtNat::Fin(n))
    }

    pub fn max_cap(n: u64) -> FlowValue {
        FlowValue::MaxCap(ExtNat::Fin(n))
    }

    pub fn tag(&self) -> MonoidTag {
        match self {
            FlowValue::Counting(_) => MonoidTag::Counting,
            FlowValue::Keyset(_) => MonoidTag::Keyset,
            FlowValue::MaxCap(_) => MonoidTag::MaxCap,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FlowValue::Counting(n) | FlowValue::MaxCap(n) => n.is_zero(),
            FlowValue::Keyset(s) => s.is_empty(),
        }
    }

    /// The monoid operation.
    pub fn add(&self, other: &FlowValue) -> Result<FlowValue, MonoidError> {
        Ok(match (self, other) {
            (FlowValue::Counting(a), FlowValue::Counting(b)) => FlowValue::Counting(a.add(*b)),
            (FlowValue::Keyset(a), FlowValue::Keyset(b)) => FlowValue::Keyset(a.union(b)),
            (FlowValue::MaxCap(a), FlowValue::MaxCap(b)) => FlowValue::MaxCap(*a.max(b)),
            _ => return Err(self.mismatch(other.tag())),
        })
    }

    /// The induced order `self ≤ other`.
    pub fn leq(&self, other: &FlowValue) -> Result<bool, MonoidError> {
        Ok(match (self, other) {
            (FlowValue::Counting(a), FlowValue::Counting(b))
            | (FlowValue::MaxCap(a), FlowValue::MaxCap(b)) => a <= b,
            (FlowValue::Keyset(a), FlowValue::Keyset(b)) => a.is_subset(b),
            _ => return Err(self.mismatch(other.tag())),
        })
    }

    /// Sums a sequence of values of the given monoid.
    pub fn sum<'a, I>(tag: MonoidTag, values: I) -> Result<FlowValue, MonoidError>
    where
        I: IntoIterator<Item = &'a FlowValue>,
    {
        values
            .into_iter()
            .try_fold(FlowValue::zero(tag), |acc, v| acc.add(v))
    }

    pub(crate) fn mismatch(&self, other: MonoidTag) -> MonoidError {
        MonoidError::TagMismatch {
            left: self.tag(),
            right: other,
        }
    }

    pub(crate) fn check_tag(&self, tag: MonoidTag) -> Result<(), MonoidError> {
        if self.tag() == tag {
            Ok(())
        } else {
            Err(self.mismatch(tag))
        }
    }
}

impl fmt::Display for FlowValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowValue::Counting(n) | FlowValue::MaxCap(n) => write!(f, "{n}"),
            FlowValue::Keyset(s) => write!(f, "{s}"),
        }
    }
}
