//! Exact integer combinatorics: binomial coefficients and the
//! colexicographic bijection between r-subsets of {0, …, n−1} and ranks
//! {0, …, C(n,r)−1}. Every j-set and every edge in the crate is addressed
//! through this bijection.
//!
//! Colex rank of s = {a_1 < … < a_r} is Σ_i C(a_i, i) with 1-based i. The
//! prefix sums do not depend on n, so ranks stay valid when the universe
//! grows.

use crate::{Error, Result};

/// C(n, r) in exact integer arithmetic.
///
/// Returns 0 when r > n. Overflow past u64 is reported as an error, never
/// wrapped. Each step of the Pascal-row product is exact: the running value
/// after step i is C(n−r+i, i), so the division never truncates.
pub fn binom(n: u64, r: u64) -> Result<u64> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = acc
            .checked_mul((n - r + i) as u128)
            .ok_or(Error::BinomialOverflow { n, r })?;
        acc /= i as u128;
    }
    u64::try_from(acc).map_err(|_| Error::BinomialOverflow { n, r })
}

/// A set of vertices, stored strictly ascending. Vertices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<u32>,
}

impl VertexSet {
    /// Build from a strictly ascending, non-empty member list.
    pub fn new(members: Vec<u32>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidVertexSet("empty vertex set".into()));
        }
        if !members.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidVertexSet(format!(
                "members must be strictly ascending, got {members:?}"
            )));
        }
        Ok(Self { members })
    }

    /// Build from members in any order, rejecting duplicates.
    pub fn from_unsorted(mut members: Vec<u32>) -> Result<Self> {
        members.sort_unstable();
        Self::new(members)
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The colex rank of an r-subset within universe {0, …, n−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetRank {
    pub rank: u64,
    /// Subset size.
    pub r: u32,
    /// Universe size.
    pub n: u32,
}

/// Colex rank of a strictly ascending slice: Σ C(a_i, i), 1-based i.
/// Does not validate against any universe bound.
pub(crate) fn colex_rank(members: &[u32]) -> Result<u64> {
    let mut acc: u128 = 0;
    for (pos, &a) in members.iter().enumerate() {
        acc += binom(a as u64, pos as u64 + 1)? as u128;
    }
    u64::try_from(acc).map_err(|_| Error::BinomialOverflow {
        n: members.last().copied().unwrap_or(0) as u64 + 1,
        r: members.len() as u64,
    })
}

/// Colex rank of `s` within universe {0, …, n−1}.
pub fn rank_set(s: &VertexSet, n: u32) -> Result<SetRank> {
    let max = *s.members().last().expect("vertex sets are non-empty");
    if max >= n {
        return Err(Error::InvalidVertexSet(format!(
            "member {max} outside universe [0, {n})"
        )));
    }
    Ok(SetRank {
        rank: colex_rank(s.members())?,
        r: s.len() as u32,
        n,
    })
}

/// Inverse of [`rank_set`]: greedy largest-binomial decomposition.
pub fn unrank_set(rank: SetRank) -> Result<VertexSet> {
    let SetRank { rank, r, n } = rank;
    if r == 0 || r > n {
        return Err(Error::RankOutOfRange { rank, n, r, total: 0 });
    }
    let total = binom(n as u64, r as u64)?;
    if rank >= total {
        return Err(Error::RankOutOfRange { rank, n, r, total });
    }
    let mut members = vec![0u32; r as usize];
    let mut rem = rank;
    let mut bound = n as u64; // exclusive upper bound for the next member
    for i in (1..=r as u64).rev() {
        // Largest a < bound with C(a, i) <= rem; a >= i-1 since C(i-1, i) = 0.
        let mut a = bound - 1;
        let mut c = binom(a, i)?;
        while c > rem {
            a -= 1;
            c = binom(a, i)?;
        }
        rem -= c;
        members[(i - 1) as usize] = a as u32;
        bound = a;
    }
    debug_assert_eq!(rem, 0);
    VertexSet::new(members)
}

/// All r-subsets of `s`, canonical, in colex order.
pub fn sub_sets(s: &VertexSet, r: u32) -> Result<Vec<VertexSet>> {
    let m = s.len() as u32;
    if r > m {
        return Err(Error::InvalidVertexSet(format!(
            "cannot take {r}-subsets of a {m}-set"
        )));
    }
    if r == 0 {
        return Err(Error::InvalidVertexSet("subset size must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(binom(m as u64, r as u64)? as usize);
    let mut iter = Combinations::new(m, r);
    while let Some(idx) = iter.next() {
        let members = idx.iter().map(|&i| s.members()[i as usize]).collect();
        out.push(VertexSet { members });
    }
    Ok(out)
}

/// Iterator over r-subsets of {0, …, m−1} in colex order. Lending-style:
/// `next` returns a view of the internal buffer.
pub(crate) struct Combinations {
    current: Vec<u32>,
    m: u32,
    started: bool,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(m: u32, r: u32) -> Self {
        Self {
            current: (0..r).collect(),
            m,
            started: false,
            done: r > m || r == 0,
        }
    }

    pub(crate) fn next(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let r = self.current.len();
        // Colex successor: bump the lowest position whose next value is free,
        // resetting everything below it.
        let mut i = 0;
        loop {
            if i == r {
                self.done = true;
                return None;
            }
            let ceiling = if i + 1 < r { self.current[i + 1] } else { self.m };
            if self.current[i] + 1 < ceiling {
                self.current[i] += 1;
                for (lo, slot) in self.current[..i].iter_mut().enumerate() {
                    *slot = lo as u32;
                }
                return Some(&self.current);
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vs(members: &[u32]) -> VertexSet {
        VertexSet::new(members.to_vec()).unwrap()
    }

    /// Independent oracle: every r-subset of {0, …, n−1}, sorted colex
    /// (by reversed member sequence).
    fn colex_enumerate(n: u32, r: u32) -> Vec<Vec<u32>> {
        fn rec(n: u32, r: u32, start: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == r as usize {
                out.push(prefix.clone());
                return;
            }
            for v in start..n {
                prefix.push(v);
                rec(n, r, v + 1, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, r, 0, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| {
            let ra: Vec<u32> = a.iter().rev().copied().collect();
            let rb: Vec<u32> = b.iter().rev().copied().collect();
            ra.cmp(&rb)
        });
        out
    }

    #[test]
    fn binom_values() {
        assert_eq!(binom(10, 3).unwrap(), 120);
        assert_eq!(binom(5, 0).unwrap(), 1);
        assert_eq!(binom(4, 7).unwrap(), 0);
        assert_eq!(binom(0, 0).unwrap(), 1);
        assert_eq!(binom(52, 5).unwrap(), 2_598_960);
    }

    #[test]
    fn binom_overflow_is_explicit() {
        // C(67,33) is the largest central-ish binomial below u64::MAX.
        assert_eq!(binom(67, 33).unwrap(), 14_226_520_737_620_288_370);
        assert!(matches!(
            binom(68, 34),
            Err(Error::BinomialOverflow { .. })
        ));
        assert!(matches!(
            binom(10_000, 5_000),
            Err(Error::BinomialOverflow { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_set(&vs(&[0, 1]), 4).unwrap().rank, 0);
        // Frozen from the colex_enumerate oracle over 2-subsets of {0..3}:
        // [0,1] [0,2] [1,2] [0,3] [1,3] [2,3]
        assert_eq!(rank_set(&vs(&[1, 3]), 4).unwrap().rank, 4);
        assert_eq!(rank_set(&vs(&[2, 3]), 4).unwrap().rank, 5);
        let oracle = colex_enumerate(4, 2);
        assert_eq!(oracle[4], vec![1, 3]);
        assert_eq!(oracle[5], vec![2, 3]);
    }

    #[test]
    fn unrank_examples() {
        let got = unrank_set(SetRank { rank: 0, r: 2, n: 4 }).unwrap();
        assert_eq!(got.members(), &[0, 1]);
        let got = unrank_set(SetRank { rank: 4, r: 2, n: 4 }).unwrap();
        assert_eq!(got.members(), &[1, 3]);
        // Greatest colex element is the top r-block.
        let total = binom(9, 4).unwrap();
        let got = unrank_set(SetRank { rank: total - 1, r: 4, n: 9 }).unwrap();
        assert_eq!(got.members(), &[5, 6, 7, 8]);
    }

    #[test]
    fn rank_rejects_out_of_universe() {
        assert!(rank_set(&vs(&[1, 4]), 4).is_err());
        assert!(unrank_set(SetRank { rank: 6, r: 2, n: 4 }).is_err());
    }

    #[test]
    fn roundtrip_exhaustive_small() {
        for n in 1..=12u32 {
            for r in 1..=n.min(5) {
                for (expect_rank, members) in colex_enumerate(n, r).into_iter().enumerate() {
                    let s = VertexSet::new(members).unwrap();
                    let sr = rank_set(&s, n).unwrap();
                    assert_eq!(sr.rank, expect_rank as u64, "rank of {:?}", s.members());
                    assert_eq!(unrank_set(sr).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn sub_sets_examples() {
        let s = vs(&[0, 1, 2]);
        let subs = sub_sets(&s, 2).unwrap();
        assert_eq!(
            subs,
            vec![vs(&[0, 1]), vs(&[0, 2]), vs(&[1, 2])],
        );
        assert_eq!(sub_sets(&s, 3).unwrap(), vec![s.clone()]);
        assert!(sub_sets(&s, 4).is_err());
        let s = vs(&[0, 2, 4, 5]);
        assert_eq!(sub_sets(&s, 2).unwrap().len() as u64, binom(4, 2).unwrap());
    }

    #[test]
    fn sub_sets_come_out_in_colex_order() {
        let s = vs(&[0, 1, 2, 3, 4]);
        for r in 1..=5u32 {
            let subs = sub_sets(&s, r).unwrap();
            for (i, sub) in subs.iter().enumerate() {
                assert_eq!(colex_rank(sub.members()).unwrap(), i as u64);
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_randomized(n in 6u32..200, seed in 0u64..1_000_000) {
            let r = 1 + (seed % 4) as u32;
            prop_assume!(r <= n);
            let total = binom(n as u64, r as u64).unwrap();
            let rank = seed % total;
            let s = unrank_set(SetRank { rank, r, n }).unwrap();
            let back = rank_set(&s, n).unwrap();
            prop_assert_eq!(back.rank, rank);
            prop_assert_eq!(back.r, r);
        }

        #[test]
        fn subset_count_matches_binom(mask in 1u32..(1 << 10), r in 1u32..6) {
            let members: Vec<u32> = (0..10).filter(|b| mask & (1 << b) != 0).collect();
            let m = members.len() as u32;
            let s = VertexSet::new(members).unwrap();
            if r <= m {
                let subs = sub_sets(&s, r).unwrap();
                prop_assert_eq!(subs.len() as u64, binom(m as u64, r as u64).unwrap());
            } else {
                prop_assert!(sub_sets(&s, r).is_err());
            }
        }
    }
}
