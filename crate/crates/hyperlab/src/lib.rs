//! A laboratory for random k-uniform hypergraphs and high-order connectivity.
//!
//! Two j-sets of vertices are j-connected when a walk of edges joins them in
//! which consecutive edges share at least j vertices. This crate provides
//! exact subset combinatorics, the binomial / uniform / process random
//! models, an incremental j-component tracker with a definition-faithful
//! brute-force oracle, closed-form degree-count statistics, and the
//! Monte Carlo experiments built on top of them (hitting-time coincidence,
//! Poisson proximity of degree counts, threshold sweeps, structure
//! enumeration). The `cli` module wraps the experiments in reproducible,
//! seed-pinned subcommands.

pub mod cli;
pub mod combinatorics;
pub mod connectivity;
pub mod experiments;
pub mod model;
pub mod statistics;

pub use combinatorics::{binom, rank_set, sub_sets, unrank_set, SetRank, VertexSet};
pub use connectivity::{ComponentPartition, ComponentTracker};
pub use model::{EdgeStream, Hypergraph, Params, Probability};

/// Crate-wide error type. The CLI maps variants onto exit codes
/// (2 parameter, 3 resource, 4 internal).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("C({n}, {r}) overflows the exact 64-bit integer range")]
    BinomialOverflow { n: u64, r: u64 },
    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),
    #[error("rank {rank} out of range: C({n}, {r}) = {total}")]
    RankOutOfRange { rank: u64, n: u32, r: u32, total: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("edge count {m} exceeds C(n, k) = {max}")]
    InvalidEdgeCount { m: u64, max: u64 },
    #[error("p = {p} falls outside [0, 1] at c = {c}")]
    POutOfRange { p: f64, c: f64 },
    #[error("degree target {s} exceeds C(n-j, k-j) = {max}")]
    DegreeTooLarge { s: u64, max: u64 },
    #[error(
        "tracker needs {entries} j-set slots, above the cap of {cap}; \
         set HYPERLAB_MEMCAP to a larger value to override"
    )]
    MemoryCap { entries: u64, cap: u64 },
    #[error("empty sample set")]
    EmptySamples,
    #[error("pmf not normalized: total mass {0}")]
    UnnormalizedPmf(f64),
    #[error("epsilon {0} outside (0, 1)")]
    InvalidEpsilon(f64),
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
