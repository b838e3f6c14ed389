use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bound::Params;
use crate::family::{is_cross_intersecting, Family, MAX_GROUND};
use crate::mask::SetMask;
use crate::matching::{maximum_independent_set, maximum_matching, BipartiteGraph};
use crate::Error;

/// Default ceiling on the number of candidate `A`-member sets the subfamily
/// enumeration accepts. Beyond this the instance is refused instead of run.
pub const DEFAULT_BRUTE_CAP: usize = 25;

/// Default ceiling on the ground size for the matching-based solver, whose
/// graph holds one vertex per candidate set and one edge per disjoint pair
/// (about `3^n` edges in the worst case).
pub const DEFAULT_FLOW_CAP: u32 = 14;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub brute_cap: usize,
    pub flow_cap: u32,
    /// Restricts the subfamily enumeration to families closed under adding
    /// in-pool supersets of members. Off by default; a pure speedup, since
    /// adding a superset of a member never invalidates a partner and always
    /// raises the sum, so every optimum is closed anyway.
    pub prune_supersets: bool,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            brute_cap: DEFAULT_BRUTE_CAP,
            flow_cap: DEFAULT_FLOW_CAP,
            prune_supersets: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Flow,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Flow => "flow",
        })
    }
}

/// An exact maximum together with a witness pair attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub params: Params,
    pub uniform: bool,
    pub method: Method,
    pub value: u64,
    pub a: Family,
    pub b: Family,
}

#[derive(Serialize)]
struct SearchResultFile {
    n: u32,
    r: u32,
    s: u32,
    value: u64,
    method: Method,
    uniform: bool,
    a: Vec<Vec<u32>>,
    b: Vec<Vec<u32>>,
}

fn family_elements(f: &Family) -> Vec<Vec<u32>> {
    f.iter().map(|m| m.elements().collect()).collect()
}

impl SearchResult {
    /// JSON form: the pair file layout (`n`, `a`, `b`) extended with the
    /// value, method, and uniform flag.
    pub fn to_json(&self) -> String {
        let file = SearchResultFile {
            n: self.params.n,
            r: self.params.r,
            s: self.params.s,
            value: self.value,
            method: self.method,
            uniform: self.uniform,
            a: family_elements(&self.a),
            b: family_elements(&self.b),
        };
        serde_json::to_string(&file).expect("search result serialization cannot fail")
    }
}

/// The candidate sets one side of a pair may draw from: every non-empty
/// subset of `[n]` with cardinality at most `card` (exactly `card` in
/// uniform mode), in canonical order.
pub fn candidate_pool(n: u32, card: u32, uniform: bool) -> Vec<SetMask> {
    assert!(n <= MAX_GROUND);
    let mut pool = Vec::new();
    for bits in 1..(1u64 << n) {
        let m = SetMask::from_bits(bits as u32);
        let ok = if uniform { m.card() == card } else { m.card() <= card };
        if ok {
            pool.push(m);
        }
    }
    pool.sort();
    pool
}

/// The unique inclusion-maximal partner for `a`: every non-empty set of
/// cardinality at most `s` (exactly `min(s, n)` in uniform mode) that meets
/// all members of `a`. Any valid partner of `a` is a subfamily of this one.
pub fn transversal(a: &Family, s: u32, uniform: bool) -> Result<Family, Error> {
    if a.is_empty() {
        return Err(Error::EmptyFamily { which: "A" });
    }
    if a.contains_empty_set() {
        return Err(Error::EmptySetMember);
    }
    let n = a.n();
    let se = s.min(n);
    let mut sets = Vec::new();
    for bits in 1..(1u64 << n) {
        let m = SetMask::from_bits(bits as u32);
        let card_ok = if uniform { m.card() == se } else { m.card() <= se };
        if card_ok && a.iter().all(|x| x.intersects(m)) {
            sets.push(m);
        }
    }
    Ok(Family::from_masks(n, sets))
}

// ---------------------------------------------------------------------------
// small fixed-width bitset used by the enumerations

#[derive(Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
    count: u32,
}

impl Bits {
    fn full(len: usize) -> Bits {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Bits { words, count: len as u32 }
    }

    fn none(len: usize) -> Bits {
        Bits { words: vec![0; len.div_ceil(64)], count: 0 }
    }

    #[inline]
    fn count(&self) -> u64 {
        u64::from(self.count)
    }

    #[inline]
    fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    fn get(&self, k: usize) -> bool {
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, k: usize) {
        debug_assert!(!self.get(k));
        self.words[k / 64] |= 1 << (k % 64);
        self.count += 1;
    }

    #[inline]
    fn clear(&mut self, k: usize) {
        debug_assert!(self.get(k));
        self.words[k / 64] &= !(1 << (k % 64));
        self.count -= 1;
    }

    fn intersect(&self, other: &Bits) -> Bits {
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        let count = words.iter().map(|w| w.count_ones()).sum();
        Bits { words, count }
    }

    /// How many set bits of `self` the intersection with `other` would drop.
    fn removed_by(&self, other: &Bits) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & !b).count_ones()))
            .sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let k = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + k)
                }
            })
        })
    }
}

// ---------------------------------------------------------------------------
// subfamily enumeration (the "brute" solver)

struct PoolContext {
    n: u32,
    left: Vec<SetMask>,
    right: Vec<SetMask>,
    /// meets[k]: right-pool sets intersecting left[k]
    meets: Vec<Bits>,
    /// preds[k]: pool indices of the one-step left-shift images of left[k]
    preds: Vec<Vec<usize>>,
    /// subs[k]: pool indices of proper subsets of left[k]
    subs: Vec<Vec<usize>>,
}

impl PoolContext {
    fn build(p: &Params, uniform: bool, opts: &SearchOptions) -> Result<PoolContext, Error> {
        if p.n > MAX_GROUND {
            return Err(Error::GroundCapExceeded { n: p.n, cap: MAX_GROUND });
        }
        let n = p.n;
        let left = candidate_pool(n, p.r_eff(), uniform);
        if left.len() > opts.brute_cap {
            return Err(Error::BruteCapExceeded { count: left.len(), cap: opts.brute_cap });
        }
        let right = candidate_pool(n, p.s_eff(), uniform);
        let meets = left
            .iter()
            .map(|&a| {
                let mut bits = Bits::none(right.len());
                for (k, &b) in right.iter().enumerate() {
                    if a.intersects(b) {
                        bits.set(k);
                    }
                }
                bits
            })
            .collect();
        let index: HashMap<SetMask, usize> =
            left.iter().enumerate().map(|(k, &m)| (m, k)).collect();
        let preds = left
            .iter()
            .map(|&m| {
                let mut out = Vec::new();
                for j in 2..=n {
                    for i in 1..j {
                        let img = m.shifted(i, j);
                        if img != m {
                            out.push(index[&img]); // same cardinality, so always pooled
                        }
                    }
                }
                out
            })
            .collect();
        let subs = if opts.prune_supersets {
            left.iter()
                .map(|&m| {
                    left.iter()
                        .enumerate()
                        .filter(|&(_, &q)| q != m && q.is_subset_of(m))
                        .map(|(k, _)| k)
                        .collect()
                })
                .collect()
        } else {
            vec![Vec::new(); left.len()]
        };
        Ok(PoolContext { n, left, right, meets, preds, subs })
    }
}

/// Exact maximum of `|A| + size of A's transversal` by depth-first
/// enumeration of the candidate subfamilies, walking only families closed
/// under one-step left shifts. That restriction is lossless: compressing an
/// optimal pair keeps its sizes, validity, and cardinalities, so a
/// shift-closed optimum always exists — and shifting strictly lowers the
/// canonical order, so the preferred witness is shift-closed too.
struct ValueSearch<'a> {
    ctx: &'a PoolContext,
    prune_supersets: bool,
    best: u64,
}

impl ValueSearch<'_> {
    fn run(ctx: &PoolContext, prune_supersets: bool) -> u64 {
        let mut search = ValueSearch { ctx, prune_supersets, best: 0 };
        let mut chosen = Bits::none(ctx.left.len());
        let t = Bits::full(ctx.right.len());
        search.dfs(0, &mut chosen, 0, &t);
        search.best
    }

    fn dfs(&mut self, k: usize, chosen: &mut Bits, members: u64, t: &Bits) {
        if t.is_empty() {
            return; // no completion has a non-empty partner
        }
        let len = self.ctx.left.len();
        // even taking every remaining set and keeping all of t cannot win
        if members + (len - k) as u64 + t.count() <= self.best {
            return;
        }
        if k == len {
            if members > 0 {
                self.best = members + t.count();
            }
            return;
        }
        let closed = self.ctx.preds[k].iter().all(|&q| chosen.get(q));
        if closed {
            let t2 = t.intersect(&self.ctx.meets[k]);
            chosen.set(k);
            self.dfs(k + 1, chosen, members + 1, &t2);
            chosen.clear(k);
        }
        // A member with a chosen subset adds itself for free, so families
        // omitting it are strictly beaten and can be skipped entirely.
        let forced = self.prune_supersets && self.ctx.subs[k].iter().any(|&q| chosen.get(q));
        if !forced {
            self.dfs(k + 1, chosen, members, t);
        }
    }
}

/// Finds the canonically smallest family of exactly `size` members whose
/// value is `target`, walking index combinations in lexicographic order
/// (which is canonical order, since the pool is canonically sorted).
fn witness_of_size(ctx: &PoolContext, size: u64, target: u64) -> Option<(Vec<usize>, Bits)> {
    let need = target - size; // required transversal size, >= 1
    fn go(
        ctx: &PoolContext,
        start: usize,
        need_more: u64,
        t: &Bits,
        need: u64,
        picked: &mut Vec<usize>,
    ) -> Option<Bits> {
        if t.count() < need {
            return None; // t only shrinks from here
        }
        if need_more == 0 {
            return (t.count() == need).then(|| t.clone());
        }
        // the excess of t over need must be removable by future picks
        if t.count() > need {
            let removable: u64 = (start..ctx.left.len())
                .map(|idx| t.removed_by(&ctx.meets[idx]))
                .sum();
            if t.count() - need > removable {
                return None;
            }
        }
        let last = ctx.left.len() - need_more as usize;
        for idx in start..=last {
            let t2 = t.intersect(&ctx.meets[idx]);
            picked.push(idx);
            if let Some(bits) = go(ctx, idx + 1, need_more - 1, &t2, need, picked) {
                return Some(bits);
            }
            picked.pop();
        }
        None
    }
    let mut picked = Vec::with_capacity(size as usize);
    let t = Bits::full(ctx.right.len());
    go(ctx, 0, size, &t, need, &mut picked).map(|bits| (picked, bits))
}

/// Exact maximum of `|A| + |B|` by subfamily enumeration, with the partner
/// side reduced away: any valid `B` is a subfamily of `A`'s transversal, so
/// only `A` is enumerated and `B` taken maximal. The witness is the argmax
/// with the canonically smallest `A` (fewest members, then lexicographic).
pub fn brute_force_max(
    p: &Params,
    uniform: bool,
    opts: &SearchOptions,
) -> Result<SearchResult, Error> {
    let ctx = PoolContext::build(p, uniform, opts)?;
    let value = ValueSearch::run(&ctx, opts.prune_supersets);
    assert!(value >= 2, "every instance admits the pair ({{1}}, {{1}})");
    let mut witness = None;
    for size in 1..value {
        if let Some(found) = witness_of_size(&ctx, size, value) {
            witness = Some(found);
            break;
        }
    }
    let (picked, t_bits) = witness.expect("an attaining family exists for the exact maximum");
    let a = Family::from_masks(ctx.n, picked.iter().map(|&k| ctx.left[k]));
    let b = Family::from_masks(ctx.n, t_bits.ones().map(|k| ctx.right[k]));
    debug_assert!(is_cross_intersecting(&a, &b));
    debug_assert_eq!(a.len() as u64 + b.len() as u64, value);
    Ok(SearchResult { params: *p, uniform, method: Method::Brute, value, a, b })
}

// ---------------------------------------------------------------------------
// conflict-graph solver (the "flow" solver)

/// Candidate sets on both sides together with the conflict graph: one edge
/// per disjoint (left, right) pair. A valid pair of families is exactly an
/// independent set in this graph.
pub struct DisjointnessGraph {
    pub left_sets: Vec<SetMask>,
    pub right_sets: Vec<SetMask>,
    pub graph: BipartiteGraph,
}

pub fn disjointness_graph(
    left_sets: Vec<SetMask>,
    right_sets: Vec<SetMask>,
) -> DisjointnessGraph {
    let mut graph = BipartiteGraph::new(left_sets.len(), right_sets.len());
    for (l, &a) in left_sets.iter().enumerate() {
        for (r, &b) in right_sets.iter().enumerate() {
            if !a.intersects(b) {
                graph.add_edge(l, r);
            }
        }
    }
    DisjointnessGraph { left_sets, right_sets, graph }
}

/// Exact maximum of `|A| + |B|` via matching duality. For each forced prefix
/// pair `([r'], [s'])` — only `([r], [s])` in uniform mode — candidates not
/// meeting the forced set on the other side are dropped, and the largest
/// independent set in the remaining conflict graph is all vertices minus a
/// maximum matching. Compression puts some optimal pair inside one of these
/// restricted universes, so the maximum over forced pairs is the true value.
pub fn flow_max(p: &Params, uniform: bool, opts: &SearchOptions) -> Result<SearchResult, Error> {
    if p.n > MAX_GROUND {
        return Err(Error::GroundCapExceeded { n: p.n, cap: MAX_GROUND });
    }
    if p.n > opts.flow_cap {
        return Err(Error::FlowCapExceeded { n: p.n, cap: opts.flow_cap });
    }
    let (re, se) = (p.r_eff(), p.s_eff());
    let left_all = candidate_pool(p.n, re, uniform);
    let right_all = candidate_pool(p.n, se, uniform);
    let forced: Vec<(u32, u32)> = if uniform {
        vec![(re, se)]
    } else {
        (1..=re).flat_map(|rp| (1..=se).map(move |sp| (rp, sp))).collect()
    };
    let mut best: Option<SearchResult> = None;
    for (rp, sp) in forced {
        let a_prefix = SetMask::prefix(rp);
        let b_prefix = SetMask::prefix(sp);
        let left: Vec<SetMask> =
            left_all.iter().copied().filter(|m| m.intersects(b_prefix)).collect();
        let right: Vec<SetMask> =
            right_all.iter().copied().filter(|m| m.intersects(a_prefix)).collect();
        let dg = disjointness_graph(left, right);
        let matching = maximum_matching(&dg.graph);
        let value = (dg.left_sets.len() + dg.right_sets.len() - matching.size) as u64;
        if best.as_ref().is_some_and(|b| value <= b.value) {
            continue;
        }
        let (in_left, in_right) = maximum_independent_set(&dg.graph, &matching);
        let a = Family::from_masks(
            p.n,
            dg.left_sets.iter().zip(&in_left).filter(|&(_, &keep)| keep).map(|(&m, _)| m),
        );
        let b = Family::from_masks(
            p.n,
            dg.right_sets.iter().zip(&in_right).filter(|&(_, &keep)| keep).map(|(&m, _)| m),
        );
        debug_assert!(a.contains(a_prefix) && b.contains(b_prefix));
        debug_assert!(is_cross_intersecting(&a, &b));
        debug_assert_eq!(a.len() as u64 + b.len() as u64, value);
        best = Some(SearchResult { params: *p, uniform, method: Method::Flow, value, a, b });
    }
    Ok(best.expect("at least one forced pair is always evaluated"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{binom, compute_bound};

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
    fn transversal_is_the_maximal_partner() {
        let a = fam(3, &[&[1], &[2]]);
        let t = transversal(&a, 2, false).unwrap();
        assert_eq!(t, fam(3, &[&[1, 2]]));
        // every valid partner sits inside the transversal
        let t_full = transversal(&a, 3, false).unwrap();
        assert_eq!(t_full, fam(3, &[&[1, 2], &[1, 2, 3]]));
    }

    #[test]
    fn transversal_rejects_degenerate_input() {
        assert_eq!(
            transversal(&Family::empty(3), 2, false).unwrap_err(),
            Error::EmptyFamily { which: "A" }
        );
        let with_empty = fam(3, &[&[], &[1]]);
        assert_eq!(
            transversal(&with_empty, 2, false).unwrap_err(),
            Error::EmptySetMember
        );
    }

    #[test]
    fn brute_smallest_instance() {
        let r = brute_force_max(&params(2, 1, 1), false, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.a, fam(2, &[&[1]]));
        assert_eq!(r.b, fam(2, &[&[1]]));
    }

    #[test]
    fn brute_three_two_two() {
        let r = brute_force_max(&params(3, 2, 2), false, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, 6);
        assert_eq!(compute_bound(&params(3, 2, 2)), r.value);
        assert!(is_cross_intersecting(&r.a, &r.b));
        // the preferred witness is the single prefix with its full transversal
        assert_eq!(r.a, fam(3, &[&[1, 2]]));
        assert_eq!(r.b, transversal(&r.a, 2, false).unwrap());
    }

    #[test]
    fn brute_cap_is_enforced() {
        let err = brute_force_max(&params(5, 5, 5), false, &SearchOptions::default()).unwrap_err();
        assert_eq!(err, Error::BruteCapExceeded { count: 31, cap: DEFAULT_BRUTE_CAP });
        let raised = SearchOptions { brute_cap: 31, ..SearchOptions::default() };
        let r = brute_force_max(&params(5, 5, 5), false, &raised).unwrap();
        assert_eq!(r.value, 32); // 2^5
    }

    #[test]
    fn brute_uniform_matches_closed_form() {
        let r = brute_force_max(&params(4, 2, 2), true, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, 6); // 1 + C(4,2) - C(2,2)
        assert!(r.a.iter().all(|m| m.card() == 2));
        assert!(r.b.iter().all(|m| m.card() == 2));
        let expected = 1u64 + binom(4, 2).to_string().parse::<u64>().unwrap()
            - binom(2, 2).to_string().parse::<u64>().unwrap();
        assert_eq!(r.value, expected);
    }

    #[test]
    fn uniform_without_disjoint_pairs_takes_everything() {
        // r + s > n: no two candidate sets conflict, so both sides fill up
        let opts = SearchOptions::default();
        let b = brute_force_max(&params(3, 2, 2), true, &opts).unwrap();
        assert_eq!(b.value, 6);
        assert_eq!(b.a.len(), 3);
        assert_eq!(b.b.len(), 3);
        let f = flow_max(&params(3, 2, 2), true, &opts).unwrap();
        assert_eq!(f.value, 6);
    }

    #[test]
    fn flow_smallest_instance() {
        let r = flow_max(&params(3, 1, 1), false, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, 2);
        assert!(is_cross_intersecting(&r.a, &r.b));
    }

    #[test]
    fn flow_cap_is_enforced() {
        let err = flow_max(&params(15, 2, 2), false, &SearchOptions::default()).unwrap_err();
        assert_eq!(err, Error::FlowCapExceeded { n: 15, cap: DEFAULT_FLOW_CAP });
    }

    #[test]
    fn solvers_agree_on_small_sweep() {
        let opts = SearchOptions::default();
        for n in 1..=4 {
            for r in 1..=n {
                for s in r..=n {
                    let p = params(n, r, s);
                    let b = brute_force_max(&p, false, &opts).unwrap();
                    let f = flow_max(&p, false, &opts).unwrap();
                    assert_eq!(b.value, f.value, "{p}");
                    assert_eq!(compute_bound(&p), b.value, "{p}");
                }
            }
        }
    }

    #[test]
    fn superset_pruning_changes_nothing() {
        let base = SearchOptions::default();
        let pruned = SearchOptions { prune_supersets: true, ..base };
        for (n, r, s, uniform) in
            [(4, 2, 3, false), (4, 2, 2, true), (5, 2, 4, false), (3, 3, 3, false)]
        {
            let p = params(n, r, s);
            let plain = brute_force_max(&p, uniform, &base).unwrap();
            let fast = brute_force_max(&p, uniform, &pruned).unwrap();
            assert_eq!(plain, fast, "{p} uniform={uniform}");
        }
    }

    #[test]
    fn disjointness_graph_edge_count_identity() {
        // edges from a set a are exactly the non-empty <=s subsets of its
        // complement, counted here independently with binomials
        for (n, r, s) in [(4u32, 2u32, 2u32), (5, 2, 3), (4, 3, 3)] {
            let left = candidate_pool(n, r, false);
            let right = candidate_pool(n, s, false);
            let dg = disjointness_graph(left, right);
            let mut expected = 0u64;
            for &a in &dg.left_sets {
                let free = i64::from(n - a.card());
                for i in 1..=i64::from(s) {
                    expected += binom(free, i).to_string().parse::<u64>().unwrap();
                }
            }
            assert_eq!(dg.graph.edge_count() as u64, expected, "n={n} r={r} s={s}");
        }
    }

    #[test]
    fn search_results_serialize_deterministically() {
        let r = brute_force_max(&params(3, 1, 1), false, &SearchOptions::default()).unwrap();
        assert_eq!(
            r.to_json(),
            r#"{"n":3,"r":1,"s":1,"value":2,"method":"brute","uniform":false,"a":[[1]],"b":[[1]]}"#
        );
    }
}
