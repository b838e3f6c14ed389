use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mask::SetMask;
use crate::Error;

/// Largest ground size for which families are materialized. Everything that
/// enumerates subsets (construction, search, traces) refuses larger grounds;
/// only the bound formula goes further.
pub const MAX_GROUND: u32 = 20;

/// A finite family of subsets of `[n]`, kept deduplicated and in canonical
/// order (cardinality ascending, then bit pattern ascending).
///
/// The empty set is a legal member — it shows up naturally when a family is
/// split along its top element — but search and verification entry points
/// reject it, since a set that intersects nothing can never sit in a
/// cross-intersecting pair with a non-empty partner.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u32,
    sets: Vec<SetMask>,
}

impl Family {
    /// The empty family over `[n]`.
    pub fn empty(n: u32) -> Family {
        assert!(n <= MAX_GROUND, "ground size {n} exceeds {MAX_GROUND}");
        Family { n, sets: Vec::new() }
    }

    /// Builds a family from arbitrary masks: sorts, deduplicates, and checks
    /// that every member stays inside `[n]`.
    pub fn from_masks<I: IntoIterator<Item = SetMask>>(n: u32, masks: I) -> Family {
        assert!(n <= MAX_GROUND, "ground size {n} exceeds {MAX_GROUND}");
        let bound = SetMask::prefix(n);
        let mut sets: Vec<SetMask> = masks.into_iter().collect();
        for m in &sets {
            assert!(m.is_subset_of(bound), "member {m} outside ground set [{n}]");
        }
        sets.sort();
        sets.dedup();
        Family { n, sets }
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    #[inline]
    pub fn sets(&self) -> &[SetMask] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = SetMask> + '_ {
        self.sets.iter().copied()
    }

    pub fn contains(&self, m: SetMask) -> bool {
        self.sets.binary_search(&m).is_ok()
    }

    pub fn contains_empty_set(&self) -> bool {
        self.sets.first() == Some(&SetMask::EMPTY)
    }

    pub fn max_card(&self) -> u32 {
        self.sets.last().map_or(0, |m| m.card())
    }

    /// The distinct member cardinalities, ascending.
    pub fn cardinalities(&self) -> Vec<u32> {
        let mut cards: Vec<u32> = self.sets.iter().map(|m| m.card()).collect();
        cards.dedup();
        cards
    }

    /// Members satisfying `keep`, as a family over the same ground set.
    pub fn filter(&self, keep: impl Fn(SetMask) -> bool) -> Family {
        Family {
            n: self.n,
            sets: self.sets.iter().copied().filter(|&m| keep(m)).collect(),
        }
    }

    pub fn union(&self, other: &Family) -> Family {
        debug_assert_eq!(self.n, other.n);
        Family::from_masks(self.n, self.iter().chain(other.iter()))
    }

    pub fn minus(&self, other: &Family) -> Family {
        debug_assert_eq!(self.n, other.n);
        self.filter(|m| !other.contains(m))
    }

    pub fn intersect(&self, other: &Family) -> Family {
        debug_assert_eq!(self.n, other.n);
        self.filter(|m| other.contains(m))
    }

    /// Deterministic preference order on families over one ground set: fewer
    /// members first, then the canonical member sequences lexicographically.
    /// Search uses it to pick a single witness among tied optima.
    pub fn canonical_cmp(&self, other: &Family) -> Ordering {
        debug_assert_eq!(self.n, other.n);
        self.sets
            .len()
            .cmp(&other.sets.len())
            .then_with(|| self.sets.cmp(&other.sets))
    }
}

/// `Debug` shows the members in canonical order, e.g. `{{3},{1,2}}`.
impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.sets.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// True when every member of `a` intersects every member of `b`. Either side
/// being empty makes the condition vacuous.
pub fn is_cross_intersecting(a: &Family, b: &Family) -> bool {
    debug_assert_eq!(a.n(), b.n());
    a.iter().all(|x| b.iter().all(|y| x.intersects(y)))
}

/// Finds one disjoint pair if there is any, for error reporting.
pub fn find_disjoint_pair(a: &Family, b: &Family) -> Option<(SetMask, SetMask)> {
    for x in a.iter() {
        for y in b.iter() {
            if !x.intersects(y) {
                return Some((x, y));
            }
        }
    }
    None
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    n: i64,
    sets: Vec<Vec<i64>>,
}

/// Parses the on-disk family format `{"n": N, "sets": [[...], ...]}`.
/// Elements are 1-indexed; member sets may arrive in any order and are
/// canonicalized. Problems are reported with the offending position.
pub fn parse_family(text: &str) -> Result<Family, Error> {
    let file: FamilyFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let n = checked_ground(file.n)?;
    Ok(Family::from_masks(n, masks_from_lists(n, &file.sets)?))
}

fn checked_ground(n: i64) -> Result<u32, Error> {
    if n < 0 || n > i64::from(MAX_GROUND) {
        return Err(Error::GroundOutOfRange { n, cap: MAX_GROUND });
    }
    Ok(n as u32)
}

fn masks_from_lists(n: u32, sets: &[Vec<i64>]) -> Result<Vec<SetMask>, Error> {
    let mut masks = Vec::with_capacity(sets.len());
    let mut seen: HashMap<SetMask, usize> = HashMap::new();
    for (index, elements) in sets.iter().enumerate() {
        let mut mask = SetMask::EMPTY;
        for &element in elements {
            if element < 1 || element > i64::from(n) {
                return Err(Error::ElementOutOfRange { index, element, n });
            }
            let e = element as u32;
            if mask.contains(e) {
                return Err(Error::DuplicateElement { index, element });
            }
            mask = mask.with(e);
        }
        if let Some(&earlier) = seen.get(&mask) {
            return Err(Error::DuplicateSet { index, earlier });
        }
        seen.insert(mask, index);
        masks.push(mask);
    }
    Ok(masks)
}

#[derive(Deserialize)]
struct PairFile {
    n: i64,
    a: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
}

/// Parses a pair of families sharing one ground set:
/// `{"n": N, "a": [[...], ...], "b": [[...], ...]}`. Unknown fields are
/// ignored, so the JSON a search run emits can be fed straight back in.
pub fn parse_pair(text: &str) -> Result<(Family, Family), Error> {
    let file: PairFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let n = checked_ground(file.n)?;
    let a = masks_from_lists(n, &file.a)?;
    let b = masks_from_lists(n, &file.b)?;
    Ok((Family::from_masks(n, a), Family::from_masks(n, b)))
}

/// Serializes a family to the on-disk format, members in canonical order.
pub fn serialize_family(f: &Family) -> String {
    let file = FamilyFile {
        n: i64::from(f.n()),
        sets: f
            .iter()
            .map(|m| m.elements().map(i64::from).collect())
            .collect(),
    };
    serde_json::to_string(&file).expect("family serialization cannot fail")
}
