use std::fmt::Write as _;

use serde::Serialize;

use crate::bound::{count_meeting_prefix, Params};
use crate::compress::{compress_pair_to_fixpoint, is_compressed};
use crate::family::{find_disjoint_pair, serialize_family, Family};
use crate::mask::SetMask;
use crate::Error;

/// Splits a family over `[n]` at its top element: members avoiding `n`, and
/// members through `n` with `n` removed — both families over `[n-1]`. The
/// second part contains the empty set exactly when `{n}` is a member.
pub fn decompose(f: &Family) -> (Family, Family) {
    let n = f.n();
    assert!(n >= 1, "cannot split a family over an empty ground set");
    let m = n - 1;
    let avoid = Family::from_masks(m, f.iter().filter(|x| !x.contains(n)));
    let through = Family::from_masks(
        m,
        f.iter().filter(|x| x.contains(n)).map(|x| x.without(n)),
    );
    (avoid, through)
}

/// Blockers of the split pair: members of `a1` disjoint from at least one
/// member of `b1`, together with their complements in the reduced ground
/// set. The two families have equal size since complementation is injective.
pub fn compute_blockers(a1: &Family, b1: &Family) -> (Family, Family) {
    debug_assert_eq!(a1.n(), b1.n());
    let m = a1.n();
    let blockers = a1.filter(|x| b1.iter().any(|y| !x.intersects(y)));
    let complements = Family::from_masks(m, blockers.iter().map(|x| x.complement(m)));
    (blockers, complements)
}

/// For a compressed cross-intersecting pair: does every blocker have exactly
/// one disjoint partner in `b1`, namely its complement? This is the pivot of
/// the certificate; it holds for every compressed cross-intersecting pair
/// and fails readily on corrupted data.
pub fn check_unique_blocker(a: &Family, b: &Family) -> Result<bool, Error> {
    if let Some((x, y)) = find_disjoint_pair(a, b) {
        return Err(Error::NotCrossIntersecting { a: x.to_string(), b: y.to_string() });
    }
    if !is_compressed(a) || !is_compressed(b) {
        return Err(Error::NotCompressed);
    }
    let (_, a1) = decompose(a);
    let (_, b1) = decompose(b);
    let (blockers, _) = compute_blockers(&a1, &b1);
    Ok(unique_blocker_holds(&blockers, &b1))
}

fn unique_blocker_holds(blockers: &Family, b1: &Family) -> bool {
    let m = b1.n();
    blockers.iter().all(|c| {
        let partners: Vec<SetMask> = b1.iter().filter(|y| !c.intersects(*y)).collect();
        partners == [c.complement(m)]
    })
}

/// Everything the certificate for one pair records: the split families, the
/// blocker bookkeeping, and the outcome of each check.
///
/// For `r < n` the two part bounds compare the regrouped split against
/// prefix-meeting counts on the reduced ground set. For `r >= n` the split
/// no longer carries the argument; the whole-ground inequality
/// `|B| <= 2^n - |A|` replaces both part bounds and is recorded in
/// `full_ground_ok`.
#[derive(Clone, Debug)]
pub struct ProofTrace {
    pub params: Params,
    /// The builder compresses non-compressed input first and says so here.
    pub precompressed: bool,
    pub a: Family,
    pub b: Family,
    pub a0: Family,
    pub a1: Family,
    pub b0: Family,
    pub b1: Family,
    pub blockers: Family,
    pub blocker_complements: Family,
    /// `a1` with the blockers removed.
    pub a1_reduced: Family,
    /// `b0` with the blocker complements added; the two parts are disjoint.
    pub b0_extended: Family,
    pub unique_blocker_ok: bool,
    pub complement_exclusion_ok: bool,
    pub sum_identity_ok: bool,
    pub part0_bound_ok: bool,
    pub part1_bound_ok: bool,
    /// `Some` exactly when `r >= n`.
    pub full_ground_ok: Option<bool>,
}

impl ProofTrace {
    /// Builds the certificate for a cross-intersecting pair under `p`,
    /// compressing the pair first if it is not already compressed.
    pub fn build(a: &Family, b: &Family, p: &Params) -> Result<ProofTrace, Error> {
        if a.n() != b.n() {
            return Err(Error::GroundMismatch { left: a.n(), right: b.n() });
        }
        if a.n() != p.n {
            return Err(Error::GroundMismatch { left: a.n(), right: p.n });
        }
        if a.is_empty() {
            return Err(Error::EmptyFamily { which: "A" });
        }
        if b.is_empty() {
            return Err(Error::EmptyFamily { which: "B" });
        }
        if a.contains_empty_set() || b.contains_empty_set() {
            return Err(Error::EmptySetMember);
        }
        if a.max_card() > p.r_eff() {
            return Err(Error::CardinalityTooLarge { card: a.max_card(), limit: p.r_eff() });
        }
        if b.max_card() > p.s_eff() {
            return Err(Error::CardinalityTooLarge { card: b.max_card(), limit: p.s_eff() });
        }
        if let Some((x, y)) = find_disjoint_pair(a, b) {
            return Err(Error::NotCrossIntersecting { a: x.to_string(), b: y.to_string() });
        }
        let (a, b, precompressed) = if is_compressed(a) && is_compressed(b) {
            (a.clone(), b.clone(), false)
        } else {
            let (ca, cb, _) = compress_pair_to_fixpoint(a, b)?;
            (ca, cb, true)
        };

        let (a0, a1) = decompose(&a);
        let (b0, b1) = decompose(&b);
        let (blockers, blocker_complements) = compute_blockers(&a1, &b1);
        let a1_reduced = a1.minus(&blockers);
        let b0_extended = b0.union(&blocker_complements);

        let mut trace = ProofTrace {
            params: *p,
            precompressed,
            a,
            b,
            a0,
            a1,
            b0,
            b1,
            blockers,
            blocker_complements,
            a1_reduced,
            b0_extended,
            unique_blocker_ok: false,
            complement_exclusion_ok: false,
            sum_identity_ok: false,
            part0_bound_ok: false,
            part1_bound_ok: false,
            full_ground_ok: None,
        };
        trace.unique_blocker_ok = trace.check_unique_blocker();
        trace.complement_exclusion_ok = trace.check_complement_exclusion();
        trace.sum_identity_ok = trace.check_sum_identity();
        if p.r >= p.n {
            let whole = trace.check_full_ground();
            trace.full_ground_ok = Some(whole);
            trace.part0_bound_ok = whole;
            trace.part1_bound_ok = whole;
        } else {
            let (p0, p1) = trace.check_part_bounds();
            trace.part0_bound_ok = p0;
            trace.part1_bound_ok = p1;
        }
        Ok(trace)
    }

    pub fn check_unique_blocker(&self) -> bool {
        unique_blocker_holds(&self.blockers, &self.b1)
    }

    /// `b0` may not contain any blocker complement: such a set would be
    /// disjoint from a member of `a` once the top element is added back.
    pub fn check_complement_exclusion(&self) -> bool {
        self.b0.intersect(&self.blocker_complements).is_empty()
    }

    /// Moving each blocker out of `a1` and its complement into `b0` is a
    /// size-for-size trade: the four regrouped families must account for
    /// every member of the pair.
    pub fn check_sum_identity(&self) -> bool {
        self.a.len() + self.b.len()
            == (self.a0.len() + self.b0_extended.len()) + (self.a1_reduced.len() + self.b1.len())
    }

    /// The two halves of the split against their reduced-ground ceilings:
    /// part 0 is `(a0, b0_extended)` against the full bound one ground lower,
    /// part 1 is `(a1_reduced, b1)` against the same count with the
    /// cardinality ceiling lowered by one.
    pub fn check_part_bounds(&self) -> (bool, bool) {
        let p = &self.params;
        let m = p.n - 1;
        let part0 = (self.a0.len() + self.b0_extended.len()) as u64
            <= 1 + count_meeting_prefix(m, p.s, p.r);
        let part1 = (self.a1_reduced.len() + self.b1.len()) as u64
            <= count_meeting_prefix(m, p.s - 1, p.r);
        (part0, part1)
    }

    /// When no cardinality ceiling binds, a pair can at best split the power
    /// set: every member of `B` rules out its complement as a member of `A`.
    pub fn check_full_ground(&self) -> bool {
        (self.a.len() + self.b.len()) as u64 <= 1u64 << self.params.n
    }

    pub fn all_ok(&self) -> bool {
        self.unique_blocker_ok
            && self.complement_exclusion_ok
            && self.sum_identity_ok
            && self.part0_bound_ok
            && self.part1_bound_ok
    }

    /// One section per check, PASS/FAIL first, families in their canonical
    /// text form.
    pub fn render_report(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let w = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(out, "certificate for {p}, split at element {}", p.n).unwrap();
        writeln!(out, "input compressed on entry: {}", if self.precompressed { "no (compressed now)" } else { "yes" }).unwrap();
        writeln!(out, "A   = {}", serialize_family(&self.a)).unwrap();
        writeln!(out, "B   = {}", serialize_family(&self.b)).unwrap();
        writeln!(out, "A0  = {}", serialize_family(&self.a0)).unwrap();
        writeln!(out, "A1  = {}", serialize_family(&self.a1)).unwrap();
        writeln!(out, "B0  = {}", serialize_family(&self.b0)).unwrap();
        writeln!(out, "B1  = {}", serialize_family(&self.b1)).unwrap();
        if self.a1.contains_empty_set() {
            writeln!(out, "note: A1 contains the empty set ({{{}}} is a member of A)", p.n).unwrap();
        }
        if self.b1.contains_empty_set() {
            writeln!(out, "note: B1 contains the empty set ({{{}}} is a member of B)", p.n).unwrap();
        }
        writeln!(out, "blockers            = {}", serialize_family(&self.blockers)).unwrap();
        writeln!(out, "blocker complements = {}", serialize_family(&self.blocker_complements)).unwrap();
        writeln!(out, "A1 minus blockers   = {}", serialize_family(&self.a1_reduced)).unwrap();
        writeln!(out, "B0 plus complements = {}", serialize_family(&self.b0_extended)).unwrap();
        writeln!(
            out,
            "[{}] unique blocker: each blocker's only disjoint partner in B1 is its complement",
            w(self.unique_blocker_ok)
        )
        .unwrap();
        writeln!(
            out,
            "[{}] complement exclusion: B0 contains no blocker complement",
            w(self.complement_exclusion_ok)
        )
        .unwrap();
        writeln!(
            out,
            "[{}] sum identity: |A|+|B| = (|A0|+|B0+|) + (|A1-|+|B1|) = ({}+{}) + ({}+{})",
            w(self.sum_identity_ok),
            self.a0.len(),
            self.b0_extended.len(),
            self.a1_reduced.len(),
            self.b1.len()
        )
        .unwrap();
        match self.full_ground_ok {
            Some(ok) => {
                writeln!(
                    out,
                    "[{}] whole-ground bound (r >= n): |A|+|B| = {} <= 2^{} = {}",
                    w(ok),
                    self.a.len() + self.b.len(),
                    p.n,
                    1u64 << p.n
                )
                .unwrap();
                writeln!(out, "part bounds carried by the whole-ground inequality").unwrap();
            }
            None => {
                let m = p.n - 1;
                writeln!(
                    out,
                    "[{}] part-0 bound: |A0|+|B0+| = {} <= {}",
                    w(self.part0_bound_ok),
                    self.a0.len() + self.b0_extended.len(),
                    1 + count_meeting_prefix(m, p.s, p.r)
                )
                .unwrap();
                writeln!(
                    out,
                    "[{}] part-1 bound: |A1-|+|B1| = {} <= {}",
                    w(self.part1_bound_ok),
                    self.a1_reduced.len() + self.b1.len(),
                    count_meeting_prefix(m, p.s - 1, p.r)
                )
                .unwrap();
            }
        }
        writeln!(out, "overall: {}", if self.all_ok() { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Checks {
            unique_blocker: bool,
            complement_exclusion: bool,
            sum_identity: bool,
            part0_bound: bool,
            part1_bound: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            full_ground: Option<bool>,
        }
        #[derive(Serialize)]
        struct TraceFile {
            n: u32,
            r: u32,
            s: u32,
            precompressed: bool,
            a: Vec<Vec<u32>>,
            b: Vec<Vec<u32>>,
            a0: Vec<Vec<u32>>,
            a1: Vec<Vec<u32>>,
            b0: Vec<Vec<u32>>,
            b1: Vec<Vec<u32>>,
            blockers: Vec<Vec<u32>>,
            blocker_complements: Vec<Vec<u32>>,
            checks: Checks,
            overall: bool,
        }
        let elems = |f: &Family| -> Vec<Vec<u32>> {
            f.iter().map(|m| m.elements().collect()).collect()
        };
        let file = TraceFile {
            n: self.params.n,
            r: self.params.r,
            s: self.params.s,
            precompressed: self.precompressed,
            a: elems(&self.a),
            b: elems(&self.b),
            a0: elems(&self.a0),
            a1: elems(&self.a1),
            b0: elems(&self.b0),
            b1: elems(&self.b1),
            blockers: elems(&self.blockers),
            blocker_complements: elems(&self.blocker_complements),
            checks: Checks {
                unique_blocker: self.unique_blocker_ok,
                complement_exclusion: self.complement_exclusion_ok,
                sum_identity: self.sum_identity_ok,
                part0_bound: self.part0_bound_ok,
                part1_bound: self.part1_bound_ok,
                full_ground: self.full_ground_ok,
            },
            overall: self.all_ok(),
        };
        serde_json::to_string(&file).expect("trace serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::build_extremal;

    fn fam(n: u32, sets: &[&[u32]]) -> Family {
        Family::from_masks(
            n,
            sets.iter().map(|s| SetMask::from_elements(s.iter().copied())),
        )
    }

    fn params(n: u32, r: u32, s: u32) -> Params {
        Params::new(n, r, s).unwrap()
    }

    #[test]
    fn decompose_splits_at_top_element() {
        let f = fam(3, &[&[1], &[3]]);
        let (f0, f1) = decompose(&f);
        assert_eq!(f0, fam(2, &[&[1]]));
        assert_eq!(f1, fam(2, &[&[]])); // {3} drops to the empty set
        assert!(f1.contains_empty_set());
    }

    #[test]
    fn blockers_and_complements() {
        let a1 = fam(2, &[&[1]]);
        let b1 = fam(2, &[&[2]]);
        let (c, cbar) = compute_blockers(&a1, &b1);
        assert_eq!(c, fam(2, &[&[1]]));
        assert_eq!(cbar, fam(2, &[&[2]]));
        assert_eq!(c.len(), cbar.len());
    }

    #[test]
    fn extremal_pair_certificate_is_tight() {
        let p = params(3, 2, 2);
        let (a, b) = build_extremal(&p).unwrap();
        let t = ProofTrace::build(&a, &b, &p).unwrap();
        assert!(!t.precompressed);
        assert!(t.all_ok());
        assert_eq!(t.full_ground_ok, None);
        // the sum regroups as (1+3) + (0+2) = 6, and both part bounds are met
        // with equality
        assert_eq!((t.a0.len(), t.b0_extended.len()), (1, 3));
        assert_eq!((t.a1_reduced.len(), t.b1.len()), (0, 2));
        assert_eq!(1 + count_meeting_prefix(2, 2, 2), 4);
        assert_eq!(count_meeting_prefix(2, 1, 2), 2);
    }

    #[test]
    fn whole_ground_branch_when_r_reaches_n() {
        // ceilings allow everything: the split bounds are replaced by the
        // power-set inequality
        let p = params(2, 2, 2);
        let a = fam(2, &[&[1], &[2], &[1, 2]]);
        let b = fam(2, &[&[1, 2]]);
        let t = ProofTrace::build(&a, &b, &p).unwrap();
        assert_eq!(t.full_ground_ok, Some(true));
        assert!(t.all_ok());
        assert_eq!(t.blockers, fam(1, &[&[]]));
        assert_eq!(t.blocker_complements, fam(1, &[&[1]]));

        let p = params(1, 1, 1);
        let a = fam(1, &[&[1]]);
        let t = ProofTrace::build(&a, &a.clone(), &p).unwrap();
        assert_eq!(t.full_ground_ok, Some(true));
        assert!(t.all_ok());
    }

    #[test]
    fn builder_compresses_when_needed() {
        let a = fam(3, &[&[2, 3]]);
        let b = fam(3, &[&[2], &[3], &[2, 3]]);
        let t = ProofTrace::build(&a, &b, &params(3, 2, 2)).unwrap();
        assert!(t.precompressed);
        assert_eq!(t.a, fam(3, &[&[1, 2]]));
        assert_eq!(t.b, fam(3, &[&[1], &[2], &[1, 2]]));
        assert!(t.all_ok());
    }

    #[test]
    fn corrupted_traces_fail_their_checks() {
        let p = params(2, 2, 2);
        let a = fam(2, &[&[1], &[2], &[1, 2]]);
        let b = fam(2, &[&[1, 2]]);
        let good = ProofTrace::build(&a, &b, &p).unwrap();
        assert!(good.check_unique_blocker());

        // a second disjoint partner for the empty-set blocker
        let mut bad = good.clone();
        bad.b1 = bad.b1.union(&fam(1, &[&[]]));
        assert!(!bad.check_unique_blocker());

        // a blocker complement smuggled into b0
        let mut bad = good.clone();
        bad.b0 = bad.b0.union(&bad.blocker_complements);
        assert!(!bad.check_complement_exclusion());
        assert!(good.check_complement_exclusion());

        // dropping a member breaks the accounting
        let mut bad = good.clone();
        bad.b1 = Family::empty(1);
        assert!(!bad.check_sum_identity());
    }

    #[test]
    fn unique_blocker_entry_point_validates() {
        let a = fam(3, &[&[1]]);
        let b = fam(3, &[&[2]]);
        assert!(matches!(
            check_unique_blocker(&a, &b).unwrap_err(),
            Error::NotCrossIntersecting { .. }
        ));
        let a = fam(3, &[&[2]]);
        let b = fam(3, &[&[2]]);
        assert_eq!(check_unique_blocker(&a, &b).unwrap_err(), Error::NotCompressed);
        let a = fam(3, &[&[1]]);
        let b = fam(3, &[&[1]]);
        assert_eq!(check_unique_blocker(&a, &b).unwrap(), true);
    }

    #[test]
    fn builder_validates_input() {
        let p = params(3, 1, 2);
        let a = fam(3, &[&[1]]);
        assert_eq!(
            ProofTrace::build(&Family::empty(3), &a, &p).unwrap_err(),
            Error::EmptyFamily { which: "A" }
        );
        assert_eq!(
            ProofTrace::build(&a, &Family::empty(3), &p).unwrap_err(),
            Error::EmptyFamily { which: "B" }
        );
        let with_empty = fam(3, &[&[], &[1]]);
        assert_eq!(
            ProofTrace::build(&with_empty, &a, &p).unwrap_err(),
            Error::EmptySetMember
        );
        let too_big = fam(3, &[&[1, 2]]);
        assert_eq!(
            ProofTrace::build(&too_big, &a, &p).unwrap_err(),
            Error::CardinalityTooLarge { card: 2, limit: 1 }
        );
        let other_ground = fam(2, &[&[1]]);
        assert_eq!(
            ProofTrace::build(&a, &other_ground, &p).unwrap_err(),
            Error::GroundMismatch { left: 3, right: 2 }
        );
    }

    #[test]
    fn report_renders_every_section() {
        let p = params(3, 2, 2);
        let (a, b) = build_extremal(&p).unwrap();
        let t = ProofTrace::build(&a, &b, &p).unwrap();
        let report = t.render_report();
        assert!(report.contains("[PASS] unique blocker"));
        assert!(report.contains("[PASS] complement exclusion"));
        assert!(report.contains("[PASS] sum identity"));
        assert!(report.contains("[PASS] part-0 bound"));
        assert!(report.contains("[PASS] part-1 bound"));
        assert!(report.contains("overall: PASS"));
        assert!(t.to_json().contains("\"overall\":true"));
    }
}
