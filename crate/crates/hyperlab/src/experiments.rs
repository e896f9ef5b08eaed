//! Monte Carlo experiments over the random models: hitting-time trials
//! along the edge-arrival process, degree-count sampling with Poisson
//! comparison, threshold sweeps in c, binomial-vs-uniform model transfer,
//! exhaustive enumeration of well-constructed hypergraphs, and
//! supercritical largest-component diagnostics.
//!
//! Trials are independent units seeded `base_seed + trial_index`, so any
//! single trial can be replayed in isolation. Aggregation folds in trial
//! order regardless of scheduling.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::combinatorics::{binom, colex_rank, sub_sets, unrank_set, Combinations, SetRank};
use crate::connectivity::{bfs_j_components, ComponentTracker};
use crate::model::{sample_binomial, sample_uniform, EdgeStream, Hypergraph, Params};
use crate::statistics::{
    exact_expected_ds, limiting_lambda, p_from_c, sample_mean, tv_distance, CnParameterization,
    Pmf,
};
use crate::{Error, Result};

/// Hard cap on the vertex universe of the well-constructed enumeration.
pub const WC_VERTEX_BUDGET: u32 = 10;

/// z for a 95% two-sided interval.
const Z95: f64 = 1.959963984540054;

/// Wilson 95% score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One process trial: the step where the last isolated j-set disappears and
/// the step where the hypergraph becomes j-connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct HittingRecord {
    pub tau_i: u64,
    pub tau_c: u64,
    pub seed: u64,
}

impl HittingRecord {
    pub fn coincided(&self) -> bool {
        self.tau_i == self.tau_c
    }
}

/// Drive one edge stream into a fresh tracker, stopping at j-connectivity.
pub fn run_hitting_trial(params: Params, seed: u64) -> Result<HittingRecord> {
    let mut tracker = ComponentTracker::new(params)?;
    let mut stream = EdgeStream::new(params, seed)?;
    let (k, n) = (params.k(), params.n());
    let mut tau_i = None;
    let mut step = 0u64;
    while let Some(rank) = stream.next_edge() {
        step += 1;
        let edge = unrank_set(SetRank { rank, r: k, n })?;
        tracker.insert_edge(&edge)?;
        if tau_i.is_none() && tracker.isolated_count() == 0 {
            tau_i = Some(step);
        }
        if tracker.is_j_connected() {
            let tau_i = tau_i.expect("j-connected implies no isolated j-sets");
            debug_assert!(tau_i <= step);
            return Ok(HittingRecord { tau_i, tau_c: step, seed });
        }
    }
    // The complete hypergraph is j-connected for every valid (n, k, j).
    Err(Error::Internal(
        "edge stream exhausted before j-connectivity".into(),
    ))
}

/// Independent hitting trials with seeds `base_seed + 0, 1, …`, in trial
/// order.
pub fn run_hitting_trials(params: Params, trials: u64, base_seed: u64) -> Result<Vec<HittingRecord>> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| run_hitting_trial(params, base_seed.wrapping_add(t)))
        .collect()
}

/// Finite-n estimate of Pr(tau_i = tau_c) with a Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CoincidenceEstimate {
    pub trials: u64,
    pub coincidences: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn estimate_coincidence(params: Params, trials: u64, base_seed: u64) -> Result<CoincidenceEstimate> {
    let records = run_hitting_trials(params, trials, base_seed)?;
    Ok(estimate_from_records(&records))
}

pub fn estimate_from_records(records: &[HittingRecord]) -> CoincidenceEstimate {
    let trials = records.len() as u64;
    let coincidences = records.iter().filter(|r| r.coincided()).count() as u64;
    let point = coincidences as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(coincidences, trials);
    CoincidenceEstimate {
        trials,
        coincidences,
        point,
        ci_low,
        ci_high,
    }
}

/// Per-trial D_s observations under H^k(n,p) with p = p_from_c, plus the
/// comparison against the exact expectation and the Poisson law.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DegreeCountReport {
    pub s: u32,
    pub c: f64,
    pub p: f64,
    pub observations: Vec<u64>,
    pub mean: f64,
    pub exact_expectation: f64,
    pub limit_lambda: f64,
    pub tv_to_poisson: f64,
}

pub fn sample_degree_counts(
    params: Params,
    cp: CnParameterization,
    trials: u64,
    base_seed: u64,
) -> Result<DegreeCountReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    ComponentTracker::new(params)?; // fail the memory cap before sampling
    let p = p_from_c(&params, cp)?;
    let s = cp.s() as u64;
    let observations: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let h = sample_binomial(params, p, base_seed.wrapping_add(t))?;
            let mut tracker = ComponentTracker::new(params)?;
            for idx in 0..h.edge_count() as usize {
                tracker.insert_edge(&h.edge_vertices(idx)?)?;
            }
            Ok(tracker.degree_count(s))
        })
        .collect::<Result<_>>()?;
    let exact = exact_expected_ds(&params, p, s)?;
    let empirical = Pmf::from_samples(&observations)?;
    let max_obs = *observations.iter().max().unwrap();
    let poisson = Pmf::poisson_truncated(exact, max_obs);
    let tv = tv_distance(&empirical, &poisson)?;
    Ok(DegreeCountReport {
        s: cp.s(),
        c: cp.c(),
        p: p.value(),
        mean: sample_mean(&observations),
        observations,
        exact_expectation: exact,
        limit_lambda: limiting_lambda(params.j(), cp.s(), cp.c()),
        tv_to_poisson: tv,
    })
}

/// Which random model drives a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Binomial,
    Uniform,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binomial" => Ok(Model::Binomial),
            "uniform" => Ok(Model::Uniform),
            other => Err(Error::InvalidParams(format!(
                "model must be `binomial` or `uniform`, got {other:?}"
            ))),
        }
    }
}

/// One row of a threshold sweep at a fixed c.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub trials: u64,
    pub frac_no_isolated: f64,
    pub frac_connected: f64,
}

fn trial_flags(params: Params, h: &Hypergraph) -> Result<(bool, bool)> {
    let mut tracker = ComponentTracker::new(params)?;
    for idx in 0..h.edge_count() as usize {
        tracker.insert_edge(&h.edge_vertices(idx)?)?;
    }
    Ok((tracker.isolated_count() == 0, tracker.is_j_connected()))
}

/// Fractions of trials with no isolated j-set / j-connected, per c. Row r
/// uses seeds `base_seed + r*trials + t`, so a one-point grid reproduces a
/// standalone run at that c.
pub fn threshold_sweep(
    params: Params,
    c_values: &[f64],
    trials: u64,
    base_seed: u64,
    model: Model,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    if c_values.is_empty() {
        return Err(Error::InvalidParams("empty c grid".into()));
    }
    ComponentTracker::new(params)?; // fail the memory cap before sampling
    let universe = params.edge_universe()?;
    let mut rows = Vec::with_capacity(c_values.len());
    for (row, &c) in c_values.iter().enumerate() {
        let p = p_from_c(&params, CnParameterization::new(0, c)?)?;
        let m = (p.value() * universe as f64).round() as u64;
        let row_seed = base_seed.wrapping_add(row as u64 * trials);
        let flags: Vec<(bool, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<(bool, bool)> {
                let seed = row_seed.wrapping_add(t);
                let h = match model {
                    Model::Binomial => sample_binomial(params, p, seed)?,
                    Model::Uniform => sample_uniform(params, m, seed)?,
                };
                trial_flags(params, &h)
            })
            .collect::<Result<_>>()?;
        let no_isolated = flags.iter().filter(|f| f.0).count() as f64;
        let connected = flags.iter().filter(|f| f.1).count() as f64;
        rows.push(SweepRow {
            c,
            trials,
            frac_no_isolated: no_isolated / trials as f64,
            frac_connected: connected / trials as f64,
        });
    }
    Ok(rows)
}

/// Paired binomial/uniform fractions at matched density M = round(p N).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TransferReport {
    pub c: f64,
    pub p: f64,
    pub m: u64,
    pub binomial_no_isolated: f64,
    pub binomial_connected: f64,
    pub uniform_no_isolated: f64,
    pub uniform_connected: f64,
    pub diff_no_isolated: f64,
    pub diff_connected: f64,
}

pub fn model_transfer_check(
    params: Params,
    c: f64,
    trials: u64,
    base_seed: u64,
) -> Result<TransferReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    ComponentTracker::new(params)?; // fail the memory cap before sampling
    let p = p_from_c(&params, CnParameterization::new(0, c)?)?;
    let universe = params.edge_universe()?;
    let m = (p.value() * universe as f64).round() as u64;
    let flags: Vec<((bool, bool), (bool, bool))> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<((bool, bool), (bool, bool))> {
            let seed = base_seed.wrapping_add(t);
            let hb = sample_binomial(params, p, seed)?;
            let hu = sample_uniform(params, m, seed)?;
            Ok((trial_flags(params, &hb)?, trial_flags(params, &hu)?))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let frac = |f: &dyn Fn(&((bool, bool), (bool, bool))) -> bool| {
        flags.iter().filter(|x| f(x)).count() as f64 / n
    };
    let b_iso = frac(&|x| x.0 .0);
    let b_con = frac(&|x| x.0 .1);
    let u_iso = frac(&|x| x.1 .0);
    let u_con = frac(&|x| x.1 .1);
    Ok(TransferReport {
        c,
        p: p.value(),
        m,
        binomial_no_isolated: b_iso,
        binomial_connected: b_con,
        uniform_no_isolated: u_iso,
        uniform_connected: u_con,
        diff_no_isolated: (b_iso - u_iso).abs(),
        diff_connected: (b_con - u_con).abs(),
    })
}

/// Isomorphism-class count of well-constructed hypergraphs at one j-size,
/// against the 2^(k s^2) bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct WellConstructedCount {
    pub k: u32,
    pub j: u32,
    pub jsize: u64,
    pub count: u64,
    pub bound: u128,
}

/// Exhaustively enumerate well-constructed hypergraphs up to isomorphism:
/// grown from a single edge by adding edges that contain at least one
/// discovered and at least one undiscovered j-set. Canonical form is the
/// minimum image of the sorted edge list under all vertex permutations.
pub fn enumerate_well_constructed(k: u32, j: u32, max_jsize: u64) -> Result<Vec<WellConstructedCount>> {
    if k < 2 || j < 1 || j > k - 1 {
        return Err(Error::InvalidParams(format!(
            "need k >= 2 and 1 <= j <= k-1, got k={k} j={j}"
        )));
    }
    let ckj = binom(k as u64, j as u64)?;
    if max_jsize < ckj {
        return Ok(Vec::new());
    }
    // Each edge past the first contributes at least one new j-set, so a
    // hypergraph of j-size s has at most s - C(k,j) + 1 edges and at most
    // j + (k-j) * edges vertices.
    let max_edges = max_jsize - ckj + 1;
    let max_vertices = j as u64 + (k - j) as u64 * max_edges;
    if max_vertices > WC_VERTEX_BUDGET as u64 {
        return Err(Error::EnumerationBudget(format!(
            "j-size {max_jsize} may need {max_vertices} vertices, budget is {WC_VERTEX_BUDGET}"
        )));
    }
    if k as u64 * max_jsize * max_jsize > 127 {
        return Err(Error::EnumerationBudget(format!(
            "bound 2^(k s^2) = 2^{} exceeds the 128-bit range",
            k as u64 * max_jsize * max_jsize
        )));
    }

    let mut enumerator = WcEnumerator {
        k,
        j,
        max_jsize,
        seen: HashSet::new(),
        counts: BTreeMap::new(),
    };
    let first_edge: u16 = (1u16 << k) - 1;
    let discovered: HashSet<u16> = subset_masks(first_edge, j);
    debug_assert_eq!(discovered.len() as u64, ckj);
    let edges = vec![first_edge];
    let canon = canonical_form(&edges, k as usize);
    enumerator.seen.insert(canon);
    enumerator.counts.insert(ckj, 1);
    enumerator.expand(&edges, &discovered, k);

    let mut rows = Vec::new();
    for s in ckj..=max_jsize {
        let count = enumerator.counts.get(&s).copied().unwrap_or(0);
        let bound = 1u128 << (k as u64 * s * s);
        assert!(
            (count as u128) <= bound,
            "count {count} breaks the 2^(k s^2) bound at s = {s}"
        );
        rows.push(WellConstructedCount { k, j, jsize: s, count, bound });
    }
    Ok(rows)
}

struct WcEnumerator {
    k: u32,
    j: u32,
    max_jsize: u64,
    seen: HashSet<Vec<u16>>,
    counts: BTreeMap<u64, u64>,
}

impl WcEnumerator {
    /// Try every edge extension of `edges`: t fresh vertices (taken as the
    /// next labels, which is lossless up to isomorphism) plus k-t old ones.
    fn expand(&mut self, edges: &[u16], discovered: &HashSet<u16>, v: u32) {
        if discovered.len() as u64 >= self.max_jsize {
            return;
        }
        for t in 0..=(self.k - self.j) {
            let old_needed = self.k - t;
            if old_needed > v {
                continue;
            }
            let fresh_mask = (((1u32 << t) - 1) << v) as u16;
            let mut combos = Combinations::new(v, old_needed);
            while let Some(idx) = combos.next() {
                let mut cand = fresh_mask;
                for &b in idx {
                    cand |= 1 << b;
                }
                self.try_candidate(edges, discovered, v, t, cand);
            }
        }
    }

    fn try_candidate(&mut self, edges: &[u16], discovered: &HashSet<u16>, v: u32, t: u32, cand: u16) {
        let old_part = cand & ((1u16 << v) - 1);
        // The edge must contain a previously discovered j-set; those live
        // entirely on old vertices.
        let old_subs = subset_masks(old_part, self.j);
        if !old_subs.iter().any(|m| discovered.contains(m)) {
            return;
        }
        let subs = subset_masks(cand, self.j);
        let fresh: Vec<u16> = subs
            .into_iter()
            .filter(|m| !discovered.contains(m))
            .collect();
        if fresh.is_empty() {
            return; // no undiscovered j-set (also excludes repeat edges)
        }
        let new_jsize = discovered.len() as u64 + fresh.len() as u64;
        if new_jsize > self.max_jsize {
            return;
        }
        let mut new_edges = edges.to_vec();
        let pos = new_edges.partition_point(|&e| e < cand);
        new_edges.insert(pos, cand);
        let canon = canonical_form(&new_edges, (v + t) as usize);
        if !self.seen.insert(canon) {
            return;
        }
        *self.counts.entry(new_jsize).or_insert(0) += 1;
        let mut new_discovered = discovered.clone();
        new_discovered.extend(fresh);
        self.expand(&new_edges, &new_discovered, v + t);
    }
}

/// All r-subsets of the set bits of `mask`, as masks.
fn subset_masks(mask: u16, r: u32) -> HashSet<u16> {
    let bits: Vec<u32> = (0..16).filter(|b| mask & (1 << b) != 0).collect();
    let mut out = HashSet::new();
    let mut combos = Combinations::new(bits.len() as u32, r);
    while let Some(idx) = combos.next() {
        let mut m = 0u16;
        for &i in idx {
            m |= 1 << bits[i as usize];
        }
        out.insert(m);
    }
    out
}

/// Minimum image of the sorted edge list over all permutations of the v
/// used vertices. Brute force; the enumeration budget keeps v <= 10.
fn canonical_form(edges: &[u16], v: usize) -> Vec<u16> {
    let mut perm: Vec<u8> = (0..v as u8).collect();
    let mut best: Option<Vec<u16>> = None;
    let mut scratch = vec![0u16; edges.len()];
    heap_permutations(&mut perm, &mut |perm| {
        for (slot, &e) in scratch.iter_mut().zip(edges) {
            let mut m = e;
            let mut out = 0u16;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out |= 1 << perm[b];
                m &= m - 1;
            }
            *slot = out;
        }
        scratch.sort_unstable();
        if best.as_ref().is_none_or(|b| scratch < *b) {
            best = Some(scratch.clone());
        }
    });
    best.expect("at least the identity permutation runs")
}

fn heap_permutations<F: FnMut(&[u8])>(arr: &mut [u8], f: &mut F) {
    fn rec<F: FnMut(&[u8])>(depth: usize, arr: &mut [u8], f: &mut F) {
        if depth <= 1 {
            f(arr);
            return;
        }
        for i in 0..depth {
            rec(depth - 1, arr, f);
            if i < depth - 1 {
                if depth % 2 == 0 {
                    arr.swap(i, depth - 1);
                } else {
                    arr.swap(0, depth - 1);
                }
            }
        }
    }
    rec(arr.len(), arr, f);
}

/// Largest-component diagnostics at p* = (1+eps) / ((C(k,j)-1) C(n,k-j)).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupercriticalReport {
    pub epsilon: f64,
    pub p_star: f64,
    pub largest_jsize: u64,
    pub coverage_min: u64,
    pub coverage_max: u64,
    pub coverage_mean: f64,
}

/// Sample H^k(n, p*), take the largest j-component, and report how evenly
/// its j-sets cover the (j-1)-sets of vertices. Diagnostic only.
pub fn supercritical_component(params: Params, epsilon: f64, seed: u64) -> Result<SupercriticalReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let ckj = binom(params.k() as u64, params.j() as u64)?;
    let nkj = binom(params.n() as u64, (params.k() - params.j()) as u64)?;
    let p_star = (1.0 + epsilon) / ((ckj - 1) as f64 * nkj as f64);
    let p = crate::model::Probability::new(p_star)?;

    let mut tracker = ComponentTracker::new(params)?;
    let h = sample_binomial(params, p, seed)?;
    for idx in 0..h.edge_count() as usize {
        tracker.insert_edge(&h.edge_vertices(idx)?)?;
    }
    let partition = tracker.component_partition();
    let largest: Vec<u64> = partition.largest_block().map_or(Vec::new(), |b| b.to_vec());

    let j = params.j();
    let (coverage_min, coverage_max, coverage_mean) = if j == 1 {
        // The only (j-1)-set is the empty set, contained in every j-set.
        let c = largest.len() as u64;
        (c, c, c as f64)
    } else {
        let slots = binom(params.n() as u64, (j - 1) as u64)?;
        let mut counts = vec![0u64; slots as usize];
        for &rank in &largest {
            let jset = unrank_set(SetRank { rank, r: j, n: params.n() })?;
            for sub in sub_sets(&jset, j - 1)? {
                counts[colex_rank(sub.members())? as usize] += 1;
            }
        }
        let min = counts.iter().copied().min().unwrap_or(0);
        let max = counts.iter().copied().max().unwrap_or(0);
        let mean = counts.iter().sum::<u64>() as f64 / slots as f64;
        (min, max, mean)
    };

    Ok(SupercriticalReport {
        epsilon,
        p_star,
        largest_jsize: largest.len() as u64,
        coverage_min,
        coverage_max,
        coverage_mean,
    })
}

/// Replay `instances` random uniform instances and compare the tracker's
/// partition against the walk-definition oracle. Returns the first mismatch
/// as (instance description, tracker dump, oracle dump) if any.
pub struct OracleMismatch {
    pub description: String,
    pub tracker_dump: String,
    pub oracle_dump: String,
}

pub fn oracle_check(instances: u64, max_n: u32, base_seed: u64) -> Result<Option<OracleMismatch>> {
    use rand::{Rng, SeedableRng};
    if max_n < 4 {
        return Err(Error::InvalidParams("max_n must be >= 4".into()));
    }
    for i in 0..instances {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(base_seed.wrapping_add(i));
        let k = if rng.random::<bool>() { 3u32 } else { 4 };
        let n = rng.random_range(k..=max_n);
        let j = rng.random_range(1..k);
        let params = Params::new(n, k, j)?;
        let universe = params.edge_universe()?;
        let m = rng.random_range(0..=universe);
        let h_seed = rng.random::<u64>();
        let h = sample_uniform(params, m, h_seed)?;

        let mut tracker = ComponentTracker::new(params)?;
        for idx in 0..h.edge_count() as usize {
            tracker.insert_edge(&h.edge_vertices(idx)?)?;
        }
        let got = tracker.component_partition();
        let want = bfs_j_components(&h)?;
        if got != want {
            return Ok(Some(OracleMismatch {
                description: format!(
                    "instance {i}: n={n} k={k} j={j} m={m} hypergraph_seed={h_seed}"
                ),
                tracker_dump: got.dump(),
                oracle_dump: want.dump(),
            }));
        }
    }
    Ok(None)
}
