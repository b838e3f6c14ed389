use std::fmt;

/// A subset of the ground set `[n] = {1, 2, ..., n}` packed into a machine
/// word: bit `i - 1` is set exactly when element `i` is present.
///
/// Masks order by cardinality first and numeric bit pattern second. That is
/// also the order in which members appear in a canonical family listing, so
/// sorting a `Vec<SetMask>` canonicalizes it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SetMask(u32);

impl SetMask {
    /// The empty set.
    pub const EMPTY: SetMask = SetMask(0);

    /// Builds a mask from raw bits. Callers are responsible for keeping the
    /// bits inside the ambient ground set.
    #[inline]
    pub fn from_bits(bits: u32) -> SetMask {
        SetMask(bits)
    }

    /// The set `{e}`. Elements are 1-indexed.
    #[inline]
    pub fn singleton(e: u32) -> SetMask {
        debug_assert!(e >= 1);
        SetMask(1 << (e - 1))
    }

    /// The prefix `[k] = {1, ..., k}`; `[0]` is the empty set.
    #[inline]
    pub fn prefix(k: u32) -> SetMask {
        debug_assert!(k <= 32);
        if k == 0 {
            SetMask(0)
        } else {
            SetMask(u32::MAX >> (32 - k))
        }
    }

    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I) -> SetMask {
        let mut bits = 0;
        for e in elements {
            debug_assert!(e >= 1);
            bits |= 1 << (e - 1);
        }
        SetMask(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn card(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, e: u32) -> bool {
        debug_assert!(e >= 1);
        self.0 >> (e - 1) & 1 == 1
    }

    #[inline]
    pub fn with(self, e: u32) -> SetMask {
        SetMask(self.0 | 1 << (e - 1))
    }

    #[inline]
    pub fn without(self, e: u32) -> SetMask {
        SetMask(self.0 & !(1 << (e - 1)))
    }

    #[inline]
    pub fn intersects(self, other: SetMask) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// The complement within `[n]`.
    #[inline]
    pub fn complement(self, n: u32) -> SetMask {
        SetMask(!self.0 & SetMask::prefix(n).0)
    }

    /// Replaces `j` by `i` when `j` is present and `i` is absent; otherwise
    /// returns the set unchanged. This is the single-set shift underlying
    /// family compression.
    #[inline]
    pub fn shifted(self, i: u32, j: u32) -> SetMask {
        debug_assert!(i != j);
        if self.contains(j) && !self.contains(i) {
            self.without(j).with(i)
        } else {
            self
        }
    }

    /// Elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() + 1;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// Sum of the elements, the summand each member contributes to a family's
    /// potential.
    #[inline]
    pub fn element_sum(self) -> u64 {
        self.elements().map(u64::from).sum()
    }
}

impl Ord for SetMask {
    #[inline]
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.card(), self.0).cmp(&(other.card(), other.0))
    }
}

impl PartialOrd for SetMask {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
