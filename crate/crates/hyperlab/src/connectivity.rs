//! Incremental j-component tracking under edge insertion.
//!
//! Inserting an edge e touches exactly the C(k,j) j-subsets of e: each gains
//! one degree, and all of them are merged into one disjoint-set class. Two
//! edges sharing at least j vertices share a j-set, so the union walk
//! realizes exactly the edge-walk relation that defines j-connectivity.
//! [`bfs_j_components`] recomputes the partition from that definition
//! directly and serves as the oracle for the tracker.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use crate::combinatorics::{colex_rank, sub_sets, Combinations, VertexSet};
use crate::model::{Hypergraph, Params};
use crate::{Error, Result};

/// Default cap on the C(n,j) table size.
pub const DEFAULT_MEMCAP: u64 = 1 << 27;

/// Table cap, overridable via `HYPERLAB_MEMCAP`. Read once per process.
pub fn memcap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("HYPERLAB_MEMCAP")
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(DEFAULT_MEMCAP)
    })
}

/// Streaming j-connectivity state over all C(n,j) j-sets.
///
/// Holds a disjoint-set forest (union by size, path halving) plus a degree
/// counter per j-set. `component_count` counts classes among covered j-sets
/// only; j-sets of degree zero are isolated, not singleton components.
#[derive(Debug)]
pub struct ComponentTracker {
    params: Params,
    /// Negative value at a root is -(class size); otherwise parent index.
    dsu: Vec<i32>,
    degree: Vec<u32>,
    jsets: u64,
    covered: u64,
    components: u64,
    largest: u64,
    edges_inserted: u64,
    /// Scratch for the j-subset ranks of one edge.
    scratch: Vec<u32>,
}

impl ComponentTracker {
    pub fn new(params: Params) -> Result<Self> {
        let jsets = params.jset_universe()?;
        let cap = memcap();
        if jsets > cap {
            return Err(Error::MemoryCap { entries: jsets, cap });
        }
        if jsets > i32::MAX as u64 {
            return Err(Error::MemoryCap {
                entries: jsets,
                cap: i32::MAX as u64,
            });
        }
        Ok(Self {
            params,
            dsu: vec![-1; jsets as usize],
            degree: vec![0; jsets as usize],
            jsets,
            covered: 0,
            components: 0,
            largest: 0,
            edges_inserted: 0,
            scratch: Vec::new(),
        })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn jset_count(&self) -> u64 {
        self.jsets
    }

    pub fn covered_count(&self) -> u64 {
        self.covered
    }

    pub fn component_count(&self) -> u64 {
        self.components
    }

    pub fn isolated_count(&self) -> u64 {
        self.jsets - self.covered
    }

    pub fn largest_component_size(&self) -> u64 {
        self.largest
    }

    pub fn edges_inserted(&self) -> u64 {
        self.edges_inserted
    }

    /// True iff a single component contains all C(n,j) j-sets.
    pub fn is_j_connected(&self) -> bool {
        self.covered == self.jsets && self.components == 1
    }

    fn find(&mut self, mut x: u32) -> u32 {
        loop {
            let p = self.dsu[x as usize];
            if p < 0 {
                return x;
            }
            let gp = self.dsu[p as usize];
            if gp < 0 {
                return p as u32;
            }
            self.dsu[x as usize] = gp;
            x = gp as u32;
        }
    }

    /// Union by size; returns the merged class size when two classes fused.
    fn union(&mut self, a: u32, b: u32) -> Option<u64> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let sa = -self.dsu[ra as usize];
        let sb = -self.dsu[rb as usize];
        let (big, small) = if sa >= sb { (ra, rb) } else { (rb, ra) };
        self.dsu[small as usize] = big as i32;
        self.dsu[big as usize] = -(sa + sb);
        Some((sa + sb) as u64)
    }

    /// Insert one k-edge: bump the degree of each of its C(k,j) j-subsets
    /// and merge them into one class. Callers guarantee distinct edges; a
    /// repeat insertion would double-count degrees.
    pub fn insert_edge(&mut self, e: &VertexSet) -> Result<()> {
        let k = self.params.k();
        let j = self.params.j();
        if e.len() != k as usize {
            return Err(Error::InvalidVertexSet(format!(
                "edge has {} vertices, expected k = {k}",
                e.len()
            )));
        }
        let members = e.members();
        if *members.last().unwrap() >= self.params.n() {
            return Err(Error::InvalidVertexSet(format!(
                "vertex {} outside [0, {})",
                members.last().unwrap(),
                self.params.n()
            )));
        }

        self.scratch.clear();
        let mut combos = Combinations::new(k, j);
        let mut subset = vec![0u32; j as usize];
        while let Some(idx) = combos.next() {
            for (slot, &i) in subset.iter_mut().zip(idx) {
                *slot = members[i as usize];
            }
            let rank = colex_rank(&subset)? as u32;
            self.scratch.push(rank);
        }

        let mut scratch = std::mem::take(&mut self.scratch);
        for &idx in &scratch {
            if self.degree[idx as usize] == 0 {
                self.covered += 1;
                self.components += 1;
                if self.largest == 0 {
                    self.largest = 1;
                }
            }
            self.degree[idx as usize] += 1;
        }
        let first = scratch[0];
        for &idx in &scratch[1..] {
            if let Some(merged) = self.union(first, idx) {
                self.components -= 1;
                self.largest = self.largest.max(merged);
            }
        }
        scratch.clear();
        self.scratch = scratch;
        self.edges_inserted += 1;
        Ok(())
    }

    /// D_s for every observed degree s, including s = 0.
    pub fn degree_histogram(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for &d in &self.degree {
            *hist.entry(d as u64).or_insert(0) += 1;
        }
        hist
    }

    /// Number of j-sets of degree exactly s.
    pub fn degree_count(&self, s: u64) -> u64 {
        self.degree.iter().filter(|&&d| d as u64 == s).count() as u64
    }

    /// The classes of covered j-sets, as ascending rank blocks.
    pub fn component_partition(&mut self) -> ComponentPartition {
        let mut blocks: HashMap<u32, Vec<u64>> = HashMap::new();
        for idx in 0..self.jsets as u32 {
            if self.degree[idx as usize] > 0 {
                let root = self.find(idx);
                blocks.entry(root).or_default().push(idx as u64);
            }
        }
        ComponentPartition::new(blocks.into_values().collect())
    }
}

/// A partition of the covered j-sets into components. Canonical form:
/// ranks ascending within a block, blocks sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    blocks: Vec<Vec<u64>>,
}

impl ComponentPartition {
    pub fn new(mut blocks: Vec<Vec<u64>>) -> Self {
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.sort_by_key(|b| b.first().copied());
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    pub fn largest_block(&self) -> Option<&[u64]> {
        self.blocks.iter().max_by_key(|b| b.len()).map(|b| b.as_slice())
    }

    /// Normative diff format: one block per line, ranks ascending,
    /// blocks ordered by smallest member.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(|r| r.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// j-size: the number of distinct j-sets contained in edges.
pub fn j_size(h: &Hypergraph) -> Result<u64> {
    let j = h.params().j();
    let mut seen = HashSet::new();
    for idx in 0..h.edge_count() as usize {
        let e = h.edge_vertices(idx)?;
        for sub in sub_sets(&e, j)? {
            seen.insert(colex_rank(sub.members())?);
        }
    }
    Ok(seen.len() as u64)
}

/// Definition-faithful oracle: connect edges that intersect in >= j
/// vertices, take connected components of edges, and hand every covered
/// j-set the class of an edge containing it. Quadratic in the edge count;
/// intended for small instances.
pub fn bfs_j_components(h: &Hypergraph) -> Result<ComponentPartition> {
    let j = h.params().j() as usize;
    let m = h.edge_count() as usize;
    let mut edges = Vec::with_capacity(m);
    for idx in 0..m {
        edges.push(h.edge_vertices(idx)?);
    }

    let mut dsu: Vec<i32> = vec![-1; m];
    fn find(dsu: &mut [i32], mut x: usize) -> usize {
        while dsu[x] >= 0 {
            let p = dsu[x] as usize;
            if dsu[p] >= 0 {
                dsu[x] = dsu[p];
                x = dsu[p] as usize;
            } else {
                return p;
            }
        }
        x
    }
    for a in 0..m {
        for b in (a + 1)..m {
            if intersection_size(edges[a].members(), edges[b].members()) >= j {
                let ra = find(&mut dsu, a);
                let rb = find(&mut dsu, b);
                if ra != rb {
                    let (sa, sb) = (-dsu[ra], -dsu[rb]);
                    let (big, small) = if sa >= sb { (ra, rb) } else { (rb, ra) };
                    dsu[small] = big as i32;
                    dsu[big] = -(sa + sb);
                }
            }
        }
    }

    let mut blocks: HashMap<usize, HashSet<u64>> = HashMap::new();
    for (idx, e) in edges.iter().enumerate() {
        let root = find(&mut dsu, idx);
        let block = blocks.entry(root).or_default();
        for sub in sub_sets(e, j as u32)? {
            block.insert(colex_rank(sub.members())?);
        }
    }
    Ok(ComponentPartition::new(
        blocks
            .into_values()
            .map(|set| set.into_iter().collect())
            .collect(),
    ))
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut k, mut count) = (0, 0, 0);
    while i < a.len() && k < b.len() {
        match a[i].cmp(&b[k]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => k += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                k += 1;
            }
        }
    }
    count
}
