use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bound::Params;
use crate::compress::{
    compress_family, compress_pair_to_fixpoint, is_compressed, potential,
};
use crate::family::{is_cross_intersecting, Family};
use crate::search::{candidate_pool, transversal};

/// Outcome counters for one randomized invariant run. All the failure
/// counters stay at zero unless an invariant is actually broken; the report
/// text is deterministic for a fixed seed, ground cap, and pair count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub seed: u64,
    pub max_n: u32,
    pub pairs: u64,
    pub steps: u64,
    pub size_failures: u64,
    pub cardinality_failures: u64,
    pub cross_failures: u64,
    pub potential_failures: u64,
    pub fixpoint_failures: u64,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.size_failures == 0
            && self.cardinality_failures == 0
            && self.cross_failures == 0
            && self.potential_failures == 0
            && self.fixpoint_failures == 0
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs checked: {} (seed {}, ground <= {})", self.pairs, self.seed, self.max_n)?;
        writeln!(f, "compression steps checked: {}", self.steps)?;
        writeln!(f, "size preservation failures: {}", self.size_failures)?;
        writeln!(f, "cardinality profile failures: {}", self.cardinality_failures)?;
        writeln!(f, "cross-intersection failures: {}", self.cross_failures)?;
        writeln!(f, "potential decrease failures: {}", self.potential_failures)?;
        writeln!(f, "fixpoint failures: {}", self.fixpoint_failures)?;
        write!(f, "overall: {}", if self.ok() { "PASS" } else { "FAIL" })
    }
}

/// Draws a random cross-intersecting pair: random parameters with
/// `2 <= n <= max_n`, a random non-empty family of sets of cardinality up to
/// `r`, and a random non-empty subfamily of its full partner family. Retries
/// until the partner family is non-empty, which fails only when no single
/// set of cardinality `s` meets every chosen left member.
pub fn random_cross_pair<R: Rng>(rng: &mut R, max_n: u32) -> (Params, Family, Family) {
    assert!(max_n >= 2, "need at least two elements to compress anything");
    loop {
        let n = rng.random_range(2..=max_n);
        let r = rng.random_range(1..=n);
        let s = rng.random_range(r..=n);
        let pool = candidate_pool(n, r, false);
        let k = rng.random_range(1..=pool.len().min(6));
        let picked = rand::seq::index::sample(rng, pool.len(), k);
        let a = Family::from_masks(n, picked.iter().map(|i| pool[i]));
        let t = transversal(&a, s, false).expect("pool members are non-empty");
        if t.is_empty() {
            continue;
        }
        let m = rng.random_range(1..=t.len());
        let picked = rand::seq::index::sample(rng, t.len(), m);
        let b = Family::from_masks(n, picked.iter().map(|i| t.sets()[i]));
        debug_assert!(is_cross_intersecting(&a, &b));
        let p = Params::new(n, r, s).expect("drawn in range");
        return (p, a, b);
    }
}

/// Applies one random left-compression to each of `count` random pairs and
/// checks the invariants the compression arguments rest on: member counts
/// and cardinality profiles survive, the pair stays cross-intersecting, and
/// the potential drops exactly when something moved. Each pair is then
/// driven to its fixpoint, which must be compressed, still
/// cross-intersecting, and size-preserving.
pub fn run(seed: u64, max_n: u32, count: u64) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FuzzReport {
        seed,
        max_n,
        pairs: count,
        steps: count,
        size_failures: 0,
        cardinality_failures: 0,
        cross_failures: 0,
        potential_failures: 0,
        fixpoint_failures: 0,
    };
    for _ in 0..count {
        let (p, a, b) = random_cross_pair(&mut rng, max_n);
        let j = rng.random_range(2..=p.n);
        let i = rng.random_range(1..j);
        let ca = compress_family(i, j, &a).expect("indices drawn in range");
        let cb = compress_family(i, j, &b).expect("indices drawn in range");
        if ca.len() != a.len() || cb.len() != b.len() {
            report.size_failures += 1;
        }
        if ca.cardinalities() != a.cardinalities() || cb.cardinalities() != b.cardinalities() {
            report.cardinality_failures += 1;
        }
        if !is_cross_intersecting(&ca, &cb) {
            report.cross_failures += 1;
        }
        let strict_a = if ca == a { potential(&ca) == potential(&a) } else { potential(&ca) < potential(&a) };
        let strict_b = if cb == b { potential(&cb) == potential(&b) } else { potential(&cb) < potential(&b) };
        if !strict_a || !strict_b {
            report.potential_failures += 1;
        }
        match compress_pair_to_fixpoint(&a, &b) {
            Ok((fa, fb, _)) => {
                if !is_compressed(&fa)
                    || !is_compressed(&fb)
                    || !is_cross_intersecting(&fa, &fb)
                    || fa.len() != a.len()
                    || fb.len() != b.len()
                    || fa.cardinalities() != a.cardinalities()
                    || fb.cardinalities() != b.cardinalities()
                {
                    report.fixpoint_failures += 1;
                }
            }
            Err(_) => report.fixpoint_failures += 1,
        }
    }
    report
}
