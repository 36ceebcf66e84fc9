//! Compact sets of base-station indices.
//!
//! Muting indicator sets, muting columns and similar small BS sets are
//! represented as bitmasks. Bit `m` set means "BS `m` is a member". The
//! canonical ordering used when sets are listed is ascending cardinality,
//! then lexicographic on the ascending member list.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Maximum number of base stations representable.
pub const MAX_BS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BsMask(u64);

impl BsMask {
    pub const EMPTY: BsMask = BsMask(0);

    pub fn from_bits(bits: u64) -> Self {
        BsMask(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn single(m: usize) -> Self {
        debug_assert!(m < MAX_BS);
        BsMask(1u64 << m)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u64;
        for m in indices {
            debug_assert!(m < MAX_BS);
            mask |= 1u64 << m;
        }
        BsMask(mask)
    }

    pub fn contains(self, m: usize) -> bool {
        m < MAX_BS && self.0 & (1u64 << m) != 0
    }

    #[must_use]
    pub fn with(self, m: usize) -> Self {
        debug_assert!(m < MAX_BS);
        BsMask(self.0 | (1u64 << m))
    }

    #[must_use]
    pub fn union(self, other: BsMask) -> Self {
        BsMask(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: BsMask) -> Self {
        BsMask(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: BsMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn overlaps(self, other: BsMask) -> bool {
        self.0 & other.0 != 0
    }

    /// Member indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let m = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(m)
            }
        })
    }

    /// Canonical set order: ascending cardinality, then lexicographic on
    /// the ascending member lists.
    pub fn canonical_cmp(self, other: BsMask) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl fmt::Debug for BsMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}
