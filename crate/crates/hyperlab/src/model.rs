//! The three random models: binomial H^k(n,p), uniform H^k(n,M), and the
//! edge-by-edge hypergraph process.
//!
//! All randomness flows through ChaCha12 ([`rand_chacha::ChaCha12Rng`]),
//! seeded with `SeedableRng::seed_from_u64`. Identical (params, seed) pairs
//! produce bit-identical hypergraphs and streams; experiment layers derive
//! per-trial seeds as `base_seed + trial_index`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::combinatorics::{binom, colex_rank, unrank_set, SetRank, VertexSet};
use crate::{Error, Result};

/// Pinned identity of the random source, recorded in run manifests.
pub const RNG_IDENTITY: &str =
    "ChaCha12 (rand_chacha), seeded via SeedableRng::seed_from_u64; trial seeds = base_seed + trial_index";

/// The (n, k, j) triple: n vertices, k-uniform edges, connectivity order j.
///
/// Requires k >= 2, 1 <= j <= k-1, n >= k. The k = 2, j = 1 case is ordinary
/// graph connectivity, admitted for sanity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Params {
    n: u32,
    k: u32,
    j: u32,
}

impl Params {
    pub fn new(n: u32, k: u32, j: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k = {k} must be >= 2")));
        }
        if j < 1 || j > k - 1 {
            return Err(Error::InvalidParams(format!(
                "j = {j} must satisfy 1 <= j <= k-1 = {}",
                k - 1
            )));
        }
        if n < k {
            return Err(Error::InvalidParams(format!("n = {n} must be >= k = {k}")));
        }
        Ok(Self { n, k, j })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// C(n, k): size of the edge universe.
    pub fn edge_universe(&self) -> Result<u64> {
        binom(self.n as u64, self.k as u64)
    }

    /// C(n, j): number of j-sets.
    pub fn jset_universe(&self) -> Result<u64> {
        binom(self.n as u64, self.j as u64)
    }
}

/// A probability, validated into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self(p))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// A k-uniform hypergraph: params plus a duplicate-free set of edge ranks,
/// held in ascending rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    params: Params,
    edges: Vec<u64>,
}

impl Hypergraph {
    /// Build from edge ranks in any order; rejects duplicates and ranks
    /// outside [0, C(n,k)).
    pub fn new(params: Params, mut edges: Vec<u64>) -> Result<Self> {
        let universe = params.edge_universe()?;
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParams(format!("duplicate edge rank {}", w[0])));
            }
        }
        if let Some(&last) = edges.last() {
            if last >= universe {
                return Err(Error::RankOutOfRange {
                    rank: last,
                    n: params.n,
                    r: params.k,
                    total: universe,
                });
            }
        }
        Ok(Self { params, edges })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    /// Edge ranks, ascending.
    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    /// The vertices of one edge, by position in the ascending rank order.
    pub fn edge_vertices(&self, idx: usize) -> Result<VertexSet> {
        unrank_set(SetRank {
            rank: self.edges[idx],
            r: self.params.k,
            n: self.params.n,
        })
    }

    /// Line-oriented text form: header `n k j m`, then one edge per line as
    /// space-separated ascending vertex labels, edges in ascending rank
    /// order. This exact layout is pinned by golden tests.
    pub fn to_text(&self) -> Result<String> {
        let mut out = format!(
            "{} {} {} {}\n",
            self.params.n,
            self.params.k,
            self.params.j,
            self.edges.len()
        );
        for idx in 0..self.edges.len() {
            let vs = self.edge_vertices(idx)?;
            let labels: Vec<String> = vs.members().iter().map(|v| v.to_string()).collect();
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "header must be `n k j m`, got {header:?}"
            )));
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad header field {s:?}: {e}")))
        };
        let (n, k, j, m) = (
            parse(fields[0])? as u32,
            parse(fields[1])? as u32,
            parse(fields[2])? as u32,
            parse(fields[3])?,
        );
        let params = Params::new(n, k, j)?;
        let mut edges = Vec::with_capacity(m as usize);
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let members: Vec<u32> = line
                .split_whitespace()
                .map(|s| {
                    s.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad vertex {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if members.len() != k as usize {
                return Err(Error::Parse(format!(
                    "edge {members:?} has {} vertices, expected k = {k}",
                    members.len()
                )));
            }
            let vs = VertexSet::new(members)
                .map_err(|e| Error::Parse(format!("bad edge line: {e}")))?;
            if *vs.members().last().unwrap() >= n {
                return Err(Error::Parse(format!(
                    "vertex {} outside [0, {n})",
                    vs.members().last().unwrap()
                )));
            }
            edges.push(colex_rank(vs.members())?);
        }
        if edges.len() as u64 != m {
            return Err(Error::Parse(format!(
                "header promised {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(params, edges)
    }
}

/// H^k(n,p): each of the C(n,k) k-sets is an edge independently with
/// probability p.
pub fn sample_binomial(params: Params, p: Probability, seed: u64) -> Result<Hypergraph> {
    let universe = params.edge_universe()?;
    let p = p.value();
    if p == 0.0 {
        return Hypergraph::new(params, Vec::new());
    }
    if p == 1.0 {
        return Hypergraph::new(params, (0..universe).collect());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for rank in 0..universe {
        if rng.random::<f64>() < p {
            edges.push(rank);
        }
    }
    Hypergraph::new(params, edges)
}

/// H^k(n,M): exactly M distinct edges, uniform over all M-subsets. Realized
/// as the first M items of [`EdgeStream`], so a length-M prefix of the
/// process and the uniform model share one distribution by construction.
pub fn sample_uniform(params: Params, m: u64, seed: u64) -> Result<Hypergraph> {
    let universe = params.edge_universe()?;
    if m > universe {
        return Err(Error::InvalidEdgeCount { m, max: universe });
    }
    let mut stream = EdgeStream::new(params, seed)?;
    let mut edges = Vec::with_capacity(m as usize);
    for _ in 0..m {
        edges.push(stream.next_edge().expect("stream exhausted below C(n,k)"));
    }
    Hypergraph::new(params, edges)
}

/// The hypergraph process: edges arrive one at a time, uniformly at random
/// among those not yet present.
///
/// Implementation per contract: rejection-sample ranks against the seen-set
/// while fewer than half of all edges are out, then shuffle the remaining
/// ranks so exhaustion stays cheap at small n.
pub struct EdgeStream {
    rng: ChaCha12Rng,
    universe: u64,
    seen: HashSet<u64>,
    emitted: u64,
    tail: Option<std::vec::IntoIter<u64>>,
}

impl EdgeStream {
    pub fn new(params: Params, seed: u64) -> Result<Self> {
        Ok(Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            universe: params.edge_universe()?,
            seen: HashSet::new(),
            emitted: 0,
            tail: None,
        })
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// The next edge rank, or `None` once all C(n,k) edges are out.
    pub fn next_edge(&mut self) -> Option<u64> {
        if self.emitted == self.universe {
            return None;
        }
        if let Some(tail) = &mut self.tail {
            let rank = tail.next()?;
            self.emitted += 1;
            return Some(rank);
        }
        if self.emitted * 2 < self.universe {
            loop {
                let rank = self.rng.random_range(0..self.universe);
                if self.seen.insert(rank) {
                    self.emitted += 1;
                    return Some(rank);
                }
            }
        }
        let mut rest: Vec<u64> = (0..self.universe)
            .filter(|rank| !self.seen.contains(rank))
            .collect();
        rest.shuffle(&mut self.rng);
        self.tail = Some(rest.into_iter());
        self.next_edge()
    }
}

impl Iterator for EdgeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        self.next_edge()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, k: u32, j: u32) -> Params {
        Params::new(n, k, j).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(4, 3, 2).is_ok());
        assert!(Params::new(4, 2, 1).is_ok());
        assert!(Params::new(4, 1, 1).is_err());
        assert!(Params::new(4, 3, 3).is_err());
        assert!(Params::new(4, 3, 0).is_err());
        assert!(Params::new(2, 3, 1).is_err());
    }

    #[test]
    fn binomial_extremes() {
        let pr = params(6, 3, 1);
        let empty = sample_binomial(pr, Probability::new(0.0).unwrap(), 7).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = sample_binomial(pr, Probability::new(1.0).unwrap(), 7).unwrap();
        assert_eq!(full.edge_count(), binom(6, 3).unwrap());
    }

    #[test]
    fn binomial_mean_edge_count() {
        // C(20,3) = 1140, mean 114, per-sample variance 1140*0.1*0.9 = 102.6.
        let pr = params(20, 3, 1);
        let p = Probability::new(0.1).unwrap();
        let trials = 1000u64;
        let total: u64 = (0..trials)
            .map(|seed| sample_binomial(pr, p, seed).unwrap().edge_count())
            .sum();
        let mean = total as f64 / trials as f64;
        let se = (102.6f64 / trials as f64).sqrt();
        assert!(
            (mean - 114.0).abs() < 3.0 * se,
            "mean {mean} strays from 114 by more than 3 SE ({se})"
        );
    }

    #[test]
    fn binomial_determinism() {
        let pr = params(12, 3, 2);
        let p = Probability::new(0.3).unwrap();
        let a = sample_binomial(pr, p, 99).unwrap();
        let b = sample_binomial(pr, p, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_binomial(pr, p, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_extremes_and_bounds() {
        let pr = params(6, 3, 1);
        let universe = pr.edge_universe().unwrap();
        assert_eq!(sample_uniform(pr, 0, 3).unwrap().edge_count(), 0);
        let full = sample_uniform(pr, universe, 3).unwrap();
        assert_eq!(full.edge_count(), universe);
        assert!(matches!(
            sample_uniform(pr, universe + 1, 3),
            Err(Error::InvalidEdgeCount { .. })
        ));
    }

    #[test]
    fn uniform_pair_frequencies() {
        // n=6, k=3: C(20,2) = 190 unordered edge pairs, each with
        // probability 1/190 per sample. 100k seeds give expected count
        // ~526.3, sd ~22.9. Chi-square over 190 cells has mean 189,
        // sd ~19.4; 305 is six sigma out.
        let pr = params(6, 3, 1);
        let trials = 100_000u64;
        let mut counts = std::collections::HashMap::new();
        for seed in 0..trials {
            let h = sample_uniform(pr, 2, seed).unwrap();
            let key = (h.edges()[0], h.edges()[1]);
            *counts.entry(key).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 190);
        let expected = trials as f64 / 190.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 305.0, "chi-square {chi2} too large");
        for (&pair, &c) in &counts {
            assert!(
                (c as f64 - expected).abs() < 5.0 * 22.9,
                "pair {pair:?} count {c} strays from {expected}"
            );
        }
    }

    #[test]
    fn stream_single_edge_then_exhausted() {
        let pr = params(3, 3, 2);
        let mut stream = EdgeStream::new(pr, 5).unwrap();
        assert_eq!(stream.next_edge(), Some(0));
        assert_eq!(stream.next_edge(), None);
        assert_eq!(stream.next_edge(), None);
    }

    #[test]
    fn stream_is_a_permutation() {
        let pr = params(6, 3, 1);
        let universe = pr.edge_universe().unwrap();
        for seed in 0..50 {
            let ranks: Vec<u64> = EdgeStream::new(pr, seed).unwrap().collect();
            assert_eq!(ranks.len() as u64, universe);
            let mut sorted = ranks.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..universe).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stream_prefix_uniform_over_triples() {
        // First three edges of the stream, as a set, should be uniform over
        // C(20,3) = 1140 triples. 100k seeds, expected ~87.7 per cell;
        // chi-square mean 1139, sd ~47.7; 1430 is six sigma out.
        let pr = params(6, 3, 1);
        let trials = 100_000u64;
        let mut counts = std::collections::HashMap::new();
        for seed in 0..trials {
            let h = sample_uniform(pr, 3, seed).unwrap();
            let key = (h.edges()[0], h.edges()[1], h.edges()[2]);
            *counts.entry(key).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 1140);
        let expected = trials as f64 / 1140.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 1430.0, "chi-square {chi2} too large");
    }

    #[test]
    fn uniform_is_the_stream_prefix() {
        let pr = params(8, 3, 2);
        for seed in 0..20 {
            let mut prefix: Vec<u64> = EdgeStream::new(pr, seed).unwrap().take(12).collect();
            prefix.sort_unstable();
            let h = sample_uniform(pr, 12, seed).unwrap();
            assert_eq!(h.edges(), prefix.as_slice());
        }
    }

    #[test]
    fn stream_determinism_across_exhaustion_switch() {
        let pr = params(5, 3, 1);
        let a: Vec<u64> = EdgeStream::new(pr, 11).unwrap().collect();
        let b: Vec<u64> = EdgeStream::new(pr, 11).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip_and_golden() {
        let pr = params(4, 3, 2);
        // Edges {0,1,2} and {1,2,3}: colex ranks 0 and 3.
        let h = Hypergraph::new(pr, vec![3, 0]).unwrap();
        let text = h.to_text().unwrap();
        assert_eq!(text, "4 3 2 2\n0 1 2\n1 2 3\n");
        let back = Hypergraph::from_text(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn text_rejects_malformed() {
        assert!(Hypergraph::from_text("").is_err());
        assert!(Hypergraph::from_text("4 3 2\n").is_err());
        assert!(Hypergraph::from_text("4 3 2 1\n0 1\n").is_err());
        assert!(Hypergraph::from_text("4 3 2 1\n0 1 9\n").is_err());
        assert!(Hypergraph::from_text("4 3 2 2\n0 1 2\n").is_err());
        assert!(Hypergraph::from_text("4 3 2 2\n0 1 2\n0 1 2\n").is_err());
    }

    #[test]
    fn duplicate_edges_rejected() {
        let pr = params(5, 3, 1);
        assert!(Hypergraph::new(pr, vec![1, 1]).is_err());
        assert!(Hypergraph::new(pr, vec![9]).is_ok());
        assert!(Hypergraph::new(pr, vec![binom(5, 3).unwrap()]).is_err());
    }
}
