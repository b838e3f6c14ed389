use std::fmt::Write as _;

use crate::family::{find_disjoint_pair, is_cross_intersecting, Family};
use crate::Error;

/// Sum over all members of the sum of their elements. Every change an
/// `(i, j)`-compression with `i < j` makes replaces an element by a smaller
/// one, so this quantity strictly decreases — it is what guarantees the
/// fixpoint sweeps terminate, and the traces record it step by step.
pub fn potential(f: &Family) -> u64 {
    f.iter().map(|m| m.element_sum()).sum()
}

/// One applied compression step in a fixpoint run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressionStep {
    pub i: u32,
    pub j: u32,
    pub potential_before: u64,
    pub potential_after: u64,
    pub changed: bool,
}

/// Ordered log of the compressions a fixpoint run applied. For a single
/// family the potentials are the family's own; for a pair they are the sum
/// over both current families.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompressionTrace {
    pub steps: Vec<CompressionStep>,
}

impl CompressionTrace {
    pub fn changing_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.changed).count()
    }

    /// Line-oriented text form, one step per line:
    /// `i j potential_before potential_after changed`.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            writeln!(
                out,
                "{} {} {} {} {}",
                s.i, s.j, s.potential_before, s.potential_after, s.changed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

fn apply(i: u32, j: u32, f: &Family) -> Family {
    // A member moves to its shifted image unless that image is already
    // present, in which case it survives unchanged. This keeps the family
    // size fixed.
    Family::from_masks(
        f.n(),
        f.iter().map(|m| {
            let shifted = m.shifted(i, j);
            if f.contains(shifted) {
                m
            } else {
                shifted
            }
        }),
    )
}

fn check_indices(i: u32, j: u32, n: u32) -> Result<(), Error> {
    if i == j {
        return Err(Error::EqualIndices(i));
    }
    for e in [i, j] {
        if e < 1 || e > n {
            return Err(Error::ElementOutsideGround { element: e, n });
        }
    }
    Ok(())
}

/// The `(i, j)`-compression of a family: each member has `j` replaced by `i`
/// where possible, except that members whose image already belongs to the
/// family stay as they are. Preserves the family's size and every member's
/// cardinality.
pub fn compress_family(i: u32, j: u32, f: &Family) -> Result<Family, Error> {
    check_indices(i, j, f.n())?;
    Ok(apply(i, j, f))
}

/// Whether every left-compression (`i < j`) fixes the family.
pub fn is_compressed(f: &Family) -> bool {
    f.iter().all(|m| {
        m.elements().all(|j| {
            (1..j).all(|i| m.contains(i) || f.contains(m.shifted(i, j)))
        })
    })
}

/// Runs full lexicographic passes over the pairs `(i, j)` with `i < j`,
/// applying each compression in turn, until a whole pass changes nothing.
/// Only changing applications are recorded, so the trace length is bounded
/// by the starting potential.
pub fn compress_to_fixpoint(f: &Family) -> (Family, CompressionTrace) {
    let n = f.n();
    let mut cur = f.clone();
    let mut trace = CompressionTrace::default();
    loop {
        let mut pass_changed = false;
        for i in 1..n {
            for j in i + 1..=n {
                let next = apply(i, j, &cur);
                if next != cur {
                    trace.steps.push(CompressionStep {
                        i,
                        j,
                        potential_before: potential(&cur),
                        potential_after: potential(&next),
                        changed: true,
                    });
                    cur = next;
                    pass_changed = true;
                }
            }
        }
        if !pass_changed {
            break;
        }
    }
    (cur, trace)
}

/// Fixpoint sweep applied to both families in lockstep: each pair `(i, j)`
/// compresses `a` and `b` together, and a step is recorded whenever at least
/// one of the two moved. Requires a cross-intersecting input; the lockstep
/// application keeps that property at every step.
pub fn compress_pair_to_fixpoint(
    a: &Family,
    b: &Family,
) -> Result<(Family, Family, CompressionTrace), Error> {
    if a.n() != b.n() {
        return Err(Error::GroundMismatch { left: a.n(), right: b.n() });
    }
    if let Some((x, y)) = find_disjoint_pair(a, b) {
        return Err(Error::NotCrossIntersecting { a: x.to_string(), b: y.to_string() });
    }
    let n = a.n();
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    let mut trace = CompressionTrace::default();
    loop {
        let mut pass_changed = false;
        for i in 1..n {
            for j in i + 1..=n {
                let next_a = apply(i, j, &cur_a);
                let next_b = apply(i, j, &cur_b);
                if next_a != cur_a || next_b != cur_b {
                    let before = potential(&cur_a) + potential(&cur_b);
                    let after = potential(&next_a) + potential(&next_b);
                    trace.steps.push(CompressionStep {
                        i,
                        j,
                        potential_before: before,
                        potential_after: after,
                        changed: true,
                    });
                    cur_a = next_a;
                    cur_b = next_b;
                    pass_changed = true;
                }
            }
        }
        if !pass_changed {
            break;
        }
        debug_assert!(is_cross_intersecting(&cur_a, &cur_b));
    }
    Ok((cur_a, cur_b, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::SetMask;

    fn fam(n: u32, sets: &[&[u32]]) -> Family {
        Family::from_masks(
            n,
            sets.iter().map(|s| SetMask::from_elements(s.iter().copied())),
        )
    }

    #[test]
    fn compression_replaces_unless_image_present() {
        let f = fam(3, &[&[2], &[1, 2]]);
        let g = compress_family(1, 2, &f).unwrap();
        assert_eq!(g, fam(3, &[&[1], &[1, 2]]));
        assert_eq!(g.len(), f.len());
    }

    #[test]
    fn compression_keeps_colliding_members() {
        // {2} wants to become {1}, which is already present, so both survive
        let f = fam(3, &[&[1], &[2]]);
        let g = compress_family(1, 2, &f).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn compression_validates_indices() {
        let f = fam(3, &[&[1]]);
        assert_eq!(
            compress_family(0, 2, &f).unwrap_err(),
            Error::ElementOutsideGround { element: 0, n: 3 }
        );
        assert_eq!(
            compress_family(1, 4, &f).unwrap_err(),
            Error::ElementOutsideGround { element: 4, n: 3 }
        );
        assert_eq!(compress_family(2, 2, &f).unwrap_err(), Error::EqualIndices(2));
    }

    #[test]
    fn potential_sums_all_elements() {
        assert_eq!(potential(&fam(3, &[&[1, 2], &[3]])), 6);
        assert_eq!(potential(&Family::empty(3)), 0);
    }

    #[test]
    fn compressed_recognition() {
        assert!(is_compressed(&fam(3, &[&[1], &[1, 2]])));
        assert!(!is_compressed(&fam(3, &[&[2]])));
        let singletons = fam(4, &[&[1], &[2], &[3], &[4]]);
        assert!(is_compressed(&singletons));
        assert!(is_compressed(&Family::empty(4)));
    }

    #[test]
    fn fixpoint_shifts_everything_left() {
        let (g, trace) = compress_to_fixpoint(&fam(2, &[&[2]]));
        assert_eq!(g, fam(2, &[&[1]]));
        assert_eq!(trace.changing_steps(), 1);

        let f = fam(3, &[&[1], &[1, 2]]);
        let (g, trace) = compress_to_fixpoint(&f);
        assert_eq!(g, f);
        assert_eq!(trace.changing_steps(), 0);

        let (g, trace) = compress_to_fixpoint(&fam(3, &[&[2, 3]]));
        assert_eq!(g, fam(3, &[&[1, 2]]));
        assert!(is_compressed(&g));
        assert!(trace.changing_steps() >= 1);
    }

    #[test]
    fn fixpoint_traces_decrease_and_stay_short() {
        let f = fam(4, &[&[3, 4], &[2], &[4]]);
        let start = potential(&f);
        let (g, trace) = compress_to_fixpoint(&f);
        assert!(is_compressed(&g));
        assert_eq!(g.len(), f.len());
        assert!(trace.steps.len() as u64 <= start);
        for s in &trace.steps {
            assert!(s.changed);
            assert!(s.potential_after < s.potential_before);
        }
        for w in trace.steps.windows(2) {
            assert!(w[1].potential_before <= w[0].potential_after);
        }
        // idempotent: a second run has nothing to do
        let (h, again) = compress_to_fixpoint(&g);
        assert_eq!(h, g);
        assert!(again.steps.is_empty());
    }

    #[test]
    fn pair_fixpoint_keeps_sizes_and_cross_intersection() {
        let a = fam(3, &[&[2, 3]]);
        let b = fam(3, &[&[2], &[3], &[2, 3]]);
        let (ca, cb, trace) = compress_pair_to_fixpoint(&a, &b).unwrap();
        assert_eq!(ca, fam(3, &[&[1, 2]]));
        assert_eq!(cb, fam(3, &[&[1], &[2], &[1, 2]]));
        assert!(is_cross_intersecting(&ca, &cb));
        assert!(is_compressed(&ca) && is_compressed(&cb));
        assert_eq!((ca.len(), cb.len()), (a.len(), b.len()));
        assert!(trace.changing_steps() >= 1);
        for s in &trace.steps {
            assert!(s.potential_after < s.potential_before);
        }
    }

    #[test]
    fn pair_fixpoint_rejects_non_cross_intersecting_input() {
        let a = fam(3, &[&[1]]);
        let b = fam(3, &[&[2]]);
        assert!(matches!(
            compress_pair_to_fixpoint(&a, &b).unwrap_err(),
            Error::NotCrossIntersecting { .. }
        ));
    }

    #[test]
    fn trace_log_format() {
        let (_, trace) = compress_to_fixpoint(&fam(2, &[&[2]]));
        assert_eq!(trace.to_log(), "1 2 2 1 true\n");
    }
}
