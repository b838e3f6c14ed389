use std::fmt;

use num_bigint::BigUint;

use crate::family::{Family, MAX_GROUND};
use crate::mask::SetMask;
use crate::Error;

/// Largest ground size the bound formula accepts. Far beyond what any
/// family-materializing operation handles; the formula is closed-form and
/// only needs big-integer arithmetic.
pub const MAX_BOUND_GROUND: u32 = 10_000;

/// Problem parameters: ground size `n`, and the two cardinality ceilings
/// `r <= s` for the pair of families. `r` and `s` may exceed `n`; operations
/// that materialize subsets clamp them to `n`, which changes nothing since a
/// subset of `[n]` never has more than `n` elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: u32,
    pub r: u32,
    pub s: u32,
}

impl Params {
    pub fn new(n: u32, r: u32, s: u32) -> Result<Params, Error> {
        if n < 1 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if n > MAX_BOUND_GROUND {
            return Err(Error::InvalidParams(format!(
                "n must be at most {MAX_BOUND_GROUND} (got {n})"
            )));
        }
        if r < 1 {
            return Err(Error::InvalidParams("r must be at least 1".into()));
        }
        if r > s {
            return Err(Error::InvalidParams(format!(
                "r must not exceed s (got r={r}, s={s})"
            )));
        }
        Ok(Params { n, r, s })
    }

    /// `r` clamped to the ground size.
    #[inline]
    pub fn r_eff(&self) -> u32 {
        self.r.min(self.n)
    }

    /// `s` clamped to the ground size.
    #[inline]
    pub fn s_eff(&self) -> u32 {
        self.s.min(self.n)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, r={}, s={})", self.n, self.r, self.s)
    }
}

/// Binomial coefficient with the zero conventions the formulas rely on:
/// `k = 0` gives 1, and any `k < 0` or `k > m` (in particular any negative
/// `m` with positive `k`) gives 0.
pub fn binom(m: i64, k: i64) -> BigUint {
    if k == 0 {
        return BigUint::from(1u32);
    }
    if k < 0 || m < k {
        return BigUint::from(0u32);
    }
    let k = k.min(m - k); // symmetry keeps the loop short
    let mut acc = BigUint::from(1u32);
    for t in 0..k {
        acc *= BigUint::from((m - t) as u64);
        acc /= BigUint::from((t + 1) as u64);
    }
    acc
}

/// An exact maximum value of `|A| + |B|`. Wraps a big integer because the
/// formula is evaluated for grounds far past what fits in a machine word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundValue(BigUint);

impl BoundValue {
    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    /// The value as a `u64` when it fits (always the case for grounds small
    /// enough to materialize, where the value is at most `2^n`).
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq<u64> for BoundValue {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

/// Evaluates `1 + sum_{i=1..s} (C(n,i) - C(n-r,i))`, the exact maximum of
/// `|A| + |B|` over cross-intersecting pairs with cardinality ceilings
/// `(r, s)` on ground `[n]`.
///
/// Terms with `i > n` vanish, so the loop stops at `min(s, n)`; when `r >= n`
/// the subtracted coefficients are all zero and the sum telescopes to `2^n`.
/// Both running coefficients are updated multiplicatively, which keeps the
/// evaluation exact and linear in `min(s, n)` big-integer steps.
pub fn compute_bound(p: &Params) -> BoundValue {
    let n = u64::from(p.n);
    let m = u64::from(p.n.saturating_sub(p.r)); // ground left after deleting [r]
    let top = u64::from(p.s_eff());
    let mut total = BigUint::from(1u32);
    let mut c_full = BigUint::from(1u32); // C(n, i)
    let mut c_rest = BigUint::from(1u32); // C(m, i), zero once i > m
    for i in 1..=top {
        c_full *= BigUint::from(n - i + 1);
        c_full /= BigUint::from(i);
        total += &c_full;
        if i <= m {
            c_rest *= BigUint::from(m - i + 1);
            c_rest /= BigUint::from(i);
            total -= &c_rest;
        }
    }
    BoundValue(total)
}

/// Counts sets `B` with `1 <= |B| <= max_card`, `B` a subset of `[ground]`,
/// and `B` meeting the prefix `[prefix_len]`, by direct enumeration. This is
/// the combinatorial reading of the bound's summands and backs the
/// certificate checks on split families.
pub fn count_meeting_prefix(ground: u32, max_card: u32, prefix_len: u32) -> u64 {
    assert!(ground <= MAX_GROUND);
    if ground == 0 || max_card == 0 {
        return 0;
    }
    let prefix = SetMask::prefix(prefix_len.min(ground));
    let mut count = 0;
    for bits in 1..(1u32 << ground) {
        let m = SetMask::from_bits(bits);
        if m.card() <= max_card && m.intersects(prefix) {
            count += 1;
        }
    }
    count
}

/// Builds the canonical optimal pair: `A = {[r]}` and `B` everything of
/// cardinality 1..=s that meets `[r]` (ceilings clamped to the ground size).
/// Its sum of sizes attains `compute_bound` exactly.
pub fn build_extremal(p: &Params) -> Result<(Family, Family), Error> {
    if p.n > MAX_GROUND {
        return Err(Error::GroundCapExceeded { n: p.n, cap: MAX_GROUND });
    }
    let prefix = SetMask::prefix(p.r_eff());
    let a = Family::from_masks(p.n, [prefix]);
    let mut b_sets = Vec::new();
    for bits in 1..(1u32 << p.n) {
        let m = SetMask::from_bits(bits);
        if m.card() <= p.s_eff() && m.intersects(prefix) {
            b_sets.push(m);
        }
    }
    let b = Family::from_masks(p.n, b_sets);
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_conventions() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(5, 5), BigUint::from(1u32));
        assert_eq!(binom(3, 0), BigUint::from(1u32));
        assert_eq!(binom(-2, 0), BigUint::from(1u32));
        assert_eq!(binom(2, 5), BigUint::from(0u32));
        assert_eq!(binom(-2, 1), BigUint::from(0u32));
        assert_eq!(binom(2, -1), BigUint::from(0u32));
        assert_eq!(binom(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(3, 1, 2).is_ok());
        assert!(Params::new(0, 1, 1).is_err());
        assert!(Params::new(3, 0, 1).is_err());
        assert!(Params::new(3, 2, 1).is_err());
        assert!(Params::new(10_001, 1, 1).is_err());
        // ceilings above n are fine, they clamp where it matters
        let p = Params::new(3, 5, 9).unwrap();
        assert_eq!((p.r_eff(), p.s_eff()), (3, 3));
    }

    #[test]
    fn bound_small_values() {
        // frozen from the exhaustive pair enumeration in tests/reference.rs
        assert_eq!(compute_bound(&Params::new(2, 1, 1).unwrap()), 2);
        assert_eq!(compute_bound(&Params::new(3, 2, 2).unwrap()), 6);
        assert_eq!(compute_bound(&Params::new(4, 2, 2).unwrap()), 8);
        assert_eq!(compute_bound(&Params::new(3, 1, 2).unwrap()), 4);
    }

    #[test]
    fn bound_is_two_to_n_when_r_reaches_ground() {
        for n in 1..=16 {
            let p = Params::new(n, n, n).unwrap();
            assert_eq!(compute_bound(&p), 1u64 << n, "n={n}");
            // pushing the ceilings past n changes nothing
            let p = Params::new(n, n + 3, n + 7).unwrap();
            assert_eq!(compute_bound(&p), 1u64 << n, "n={n} clamped");
        }
    }

    #[test]
    fn bound_matches_direct_enumeration_on_small_grounds() {
        for n in 1..=8 {
            for r in 1..=n + 2 {
                for s in r..=n + 2 {
                    let p = Params::new(n, r, s).unwrap();
                    let by_formula = compute_bound(&p);
                    let by_count = 1 + count_meeting_prefix(n, p.s_eff(), p.r_eff());
                    assert_eq!(by_formula, by_count, "{p}");
                }
            }
        }
    }

    #[test]
    fn bound_handles_large_grounds_exactly() {
        let p = Params::new(10_000, 1, 1).unwrap();
        assert_eq!(compute_bound(&p), 2);
        let p = Params::new(10_000, 10_000, 10_000).unwrap();
        let expected = BigUint::from(2u32).pow(10_000);
        assert_eq!(compute_bound(&p).as_biguint(), &expected);
        let p = Params::new(10_000, 3, 7).unwrap();
        // 1 + sum_{i=1..7} (C(10000,i) - C(9997,i)), evaluated independently
        let mut expected = BigUint::from(1u32);
        for i in 1..=7 {
            expected += binom(10_000, i) - binom(9_997, i);
        }
        assert_eq!(compute_bound(&p).as_biguint(), &expected);
    }

    #[test]
    fn extremal_pair_for_3_2_2() {
        let (a, b) = build_extremal(&Params::new(3, 2, 2).unwrap()).unwrap();
        assert_eq!(format!("{a:?}"), "{{1,2}}");
        assert_eq!(format!("{b:?}"), "{{1},{2},{1,2},{1,3},{2,3}}");
        assert_eq!(a.len() + b.len(), 6);
    }

    #[test]
    fn extremal_pair_attains_bound_with_clamping() {
        for n in 1..=10 {
            for r in 1..=n + 2 {
                for s in r..=n + 2 {
                    let p = Params::new(n, r, s).unwrap();
                    let (a, b) = build_extremal(&p).unwrap();
                    let sum = (a.len() + b.len()) as u64;
                    assert_eq!(compute_bound(&p), sum, "{p}");
                    assert!(crate::family::is_cross_intersecting(&a, &b));
                }
            }
        }
    }

    #[test]
    fn extremal_refuses_oversized_ground() {
        let p = Params::new(21, 2, 2).unwrap();
        assert_eq!(
            build_extremal(&p).unwrap_err(),
            Error::GroundCapExceeded { n: 21, cap: MAX_GROUND }
        );
    }
}
