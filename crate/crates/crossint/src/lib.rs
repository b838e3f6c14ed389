//! Exact computation and verification for pairs of cross-intersecting set
//! families: two families `A` and `B` of subsets of `{1, ..., n}` such that
//! every member of `A` meets every member of `B`, with member cardinalities
//! capped at `r` on the left and `s` on the right (`r <= s`).
//!
//! The crate computes the exact maximum of `|A| + |B|` in closed form
//! ([`bound::compute_bound`]), builds a pair attaining it
//! ([`bound::build_extremal`]), finds the maximum independently by exhaustive
//! search and by a matching-based solver ([`search`]), normalizes families by
//! left-compression ([`compress`]), and checks the step-by-step certificate
//! that ties a concrete optimal pair to the closed form ([`prooftrace`]).
//! Randomized invariant checks live in [`fuzz`].
//!
//! Families are kept small and explicit: ground sets up to 20 elements are
//! represented as bitmasks ([`mask::SetMask`]), while the closed-form bound
//! alone scales to ground sets of ten thousand elements via exact big-integer
//! arithmetic.

pub mod bound;
pub mod compress;
pub mod family;
pub mod fuzz;
pub mod mask;
pub mod matching;
pub mod prooftrace;
pub mod search;

pub use bound::{binom, build_extremal, compute_bound, BoundValue, Params, MAX_BOUND_GROUND};
pub use compress::{
    compress_family, compress_pair_to_fixpoint, compress_to_fixpoint, is_compressed, potential,
    CompressionStep, CompressionTrace,
};
pub use family::{
    find_disjoint_pair, is_cross_intersecting, parse_family, parse_pair, serialize_family,
    Family, MAX_GROUND,
};
pub use mask::SetMask;
pub use prooftrace::ProofTrace;
pub use search::{
    brute_force_max, flow_max, transversal, Method, SearchOptions, SearchResult,
    DEFAULT_BRUTE_CAP, DEFAULT_FLOW_CAP,
};

/// Everything that can go wrong across the crate: malformed or inconsistent
/// input, parameters out of range, and instances past the explicit caps.
/// Carrying positions and limits in the variants keeps messages actionable
/// without string-matching at call sites.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("ground set size {n} exceeds the explicit-family cap of {cap}")]
    GroundCapExceeded { n: u32, cap: u32 },

    #[error("ground set size {n} is outside the supported range 0..={cap}")]
    GroundOutOfRange { n: i64, cap: u32 },

    #[error("set #{index}: element {element} is outside the ground set 1..={n}")]
    ElementOutOfRange { index: usize, element: i64, n: u32 },

    #[error("set #{index}: element {element} appears twice")]
    DuplicateElement { index: usize, element: i64 },

    #[error("set #{index} repeats set #{earlier}")]
    DuplicateSet { index: usize, earlier: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("element {element} is outside the ground set 1..={n}")]
    ElementOutsideGround { element: u32, n: u32 },

    #[error("compression needs two distinct elements, got {0} twice")]
    EqualIndices(u32),

    #[error("families are not cross-intersecting: {a} and {b} are disjoint")]
    NotCrossIntersecting { a: String, b: String },

    #[error("family {which} must be non-empty here")]
    EmptyFamily { which: &'static str },

    #[error("the empty set is not allowed as a member here")]
    EmptySetMember,

    #[error("candidate pool holds {count} sets, over the cap of {cap}")]
    BruteCapExceeded { count: usize, cap: usize },

    #[error("ground set size {n} exceeds the matching-solver cap of {cap}")]
    FlowCapExceeded { n: u32, cap: u32 },

    #[error("families live on different ground sets: {left} vs {right}")]
    GroundMismatch { left: u32, right: u32 },

    #[error("the pair is not compressed")]
    NotCompressed,

    #[error("member cardinality {card} exceeds the ceiling {limit}")]
    CardinalityTooLarge { card: u32, limit: u32 },
}
