//! Tanner graphs, binary vectors and graph diagnostics.

mod alist;
mod census;
mod gf2;
mod tanner;

pub use alist::{load_alist, save_alist};
pub use census::{
    census_all_subsets, census_trapping_subgraphs, classify_subset, enumerate_connected_subsets,
    enumerate_connected_subsets_containing, induced_check_degrees, odd_check_count,
    SubgraphClass,
};
pub use gf2::{gf2_rank, BitMatrix};
pub use tanner::{build_tanner_155, CirculantSpec};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Sparse bipartite graph of an LDPC code.
///
/// Variable nodes are `0..n`, check nodes `0..m`. Both adjacency lists are
/// kept sorted and mirror each other, which makes the graph its own
/// canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    var_neighbors: Vec<Vec<usize>>,
    check_neighbors: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from per-check variable lists. Lists are sorted;
    /// duplicates and out-of-range indices are rejected.
    pub fn from_check_neighbors(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let m = checks.len();
        let mut check_neighbors = checks;
        let mut var_neighbors = vec![Vec::new(); n];
        for (c, vars) in check_neighbors.iter_mut().enumerate() {
            vars.sort_unstable();
            for w in vars.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidGraph(format!(
                        "parallel edge between check {c} and variable {}",
                        w[0]
                    )));
                }
            }
            for &v in vars.iter() {
                if v >= n {
                    return Err(Error::InvalidGraph(format!(
                        "check {c} references variable {v}, index out of range (n = {n})"
                    )));
                }
                var_neighbors[v].push(c);
            }
        }
        Ok(Self { n, m, var_neighbors, check_neighbors })
    }

    /// Builds a graph from an edge list of `(variable, check)` pairs.
    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut checks = vec![Vec::new(); m];
        for &(v, c) in edges {
            if c >= m {
                return Err(Error::InvalidGraph(format!(
                    "check index {c} out of range (m = {m})"
                )));
            }
            checks[c].push(v);
        }
        Self::from_check_neighbors(n, checks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_neighbors[v]
    }

    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_neighbors[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_neighbors[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_neighbors[c].len()
    }

    pub fn edge_count(&self) -> usize {
        self.check_neighbors.iter().map(Vec::len).sum()
    }

    pub fn max_var_degree(&self) -> usize {
        self.var_neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        self.check_neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Returns `Some(d)` when every variable node has degree `d`.
    pub fn uniform_var_degree(&self) -> Option<usize> {
        let d = self.var_neighbors.first()?.len();
        self.var_neighbors.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Returns `Some(d)` when every check node has degree `d`.
    pub fn uniform_check_degree(&self) -> Option<usize> {
        let d = self.check_neighbors.first()?.len();
        self.check_neighbors.iter().all(|l| l.len() == d).then_some(d)
    }

    /// Variables sharing at least one check with `v`, sorted, excluding `v`.
    pub fn var_var_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.var_neighbors[v]
            .iter()
            .flat_map(|&c| self.check_neighbors[c].iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Applies a relabeling: variable `v` becomes `var_perm[v]`, check `c`
    /// becomes `check_perm[c]`.
    pub fn relabel(&self, var_perm: &[usize], check_perm: &[usize]) -> Result<Self> {
        if var_perm.len() != self.n || check_perm.len() != self.m {
            return Err(Error::InvalidParameter("permutation length mismatch".into()));
        }
        let mut checks = vec![Vec::new(); self.m];
        for (c, vars) in self.check_neighbors.iter().enumerate() {
            checks[check_perm[c]] = vars.iter().map(|&v| var_perm[v]).collect();
        }
        Self::from_check_neighbors(self.n, checks)
    }

    /// Length of the shortest cycle, or `None` for a forest.
    ///
    /// Runs a truncated BFS from every variable node; every cycle passes
    /// through a variable node, and a BFS rooted on a shortest cycle finds
    /// it exactly.
    pub fn girth(&self) -> Option<usize> {
        let total = self.n + self.m;
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; total];
        let mut parent = vec![usize::MAX; total];
        let mut queue = VecDeque::new();
        let mut touched = Vec::new();
        for root in 0..self.n {
            for &t in &touched {
                dist[t] = usize::MAX;
                parent[t] = usize::MAX;
            }
            touched.clear();
            queue.clear();
            dist[root] = 0;
            touched.push(root);
            queue.push_back(root);
            'bfs: while let Some(u) = queue.pop_front() {
                // Any cycle closed from here on is at least 2 * dist[u] long.
                if 2 * dist[u] >= best {
                    break;
                }
                let neighbors: &[usize] = if u < self.n {
                    &self.var_neighbors[u]
                } else {
                    &self.check_neighbors[u - self.n]
                };
                for &w in neighbors {
                    let w = if u < self.n { w + self.n } else { w };
                    if w == parent[u] {
                        continue;
                    }
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        touched.push(w);
                        queue.push_back(w);
                    } else {
                        let len = dist[u] + dist[w] + 1;
                        if len < best {
                            best = len;
                        }
                        if best <= 4 {
                            break 'bfs;
                        }
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Distance (in edges) from variable `v` to every check node, `None` if
    /// unreachable.
    pub fn check_distances_from_var(&self, v: usize) -> Vec<Option<usize>> {
        let mut var_dist = vec![usize::MAX; self.n];
        let mut check_dist = vec![None; self.m];
        let mut queue = VecDeque::new();
        var_dist[v] = 0;
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            for &c in &self.var_neighbors[u] {
                if check_dist[c].is_none() {
                    let dc = var_dist[u] + 1;
                    check_dist[c] = Some(dc);
                    for &w in &self.check_neighbors[c] {
                        if var_dist[w] == usize::MAX {
                            var_dist[w] = dc + 1;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        check_dist
    }

    /// Per-check parity of `v`.
    pub fn syndrome(&self, v: &BinaryVector) -> Result<BinaryVector> {
        self.expect_len(v.len())?;
        let bits = v.to_bits();
        let support = (0..self.m)
            .filter(|&c| self.check_neighbors[c].iter().filter(|&&i| bits[i]).count() % 2 == 1)
            .collect();
        Ok(BinaryVector { len: self.m, support })
    }

    pub fn is_codeword(&self, v: &BinaryVector) -> Result<bool> {
        self.expect_len(v.len())?;
        Ok(self.is_codeword_bits(&v.to_bits()))
    }

    /// Codeword test on a dense bit slice (no length check beyond indexing).
    pub fn is_codeword_bits(&self, bits: &[bool]) -> bool {
        self.check_neighbors
            .iter()
            .all(|vars| vars.iter().filter(|&&i| bits[i]).count() % 2 == 0)
    }

    pub fn gf2_rank(&self) -> usize {
        gf2_rank(self)
    }

    /// Design rate `(n - rank) / n`.
    pub fn rate(&self) -> f64 {
        (self.n - self.gf2_rank()) as f64 / self.n as f64
    }

    pub(crate) fn expect_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }
}

/// A binary vector stored by its support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryVector {
    len: usize,
    support: Vec<usize>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, support: Vec::new() }
    }

    /// Builds a vector from positions set to one. Positions are sorted and
    /// deduplicated.
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut support: Vec<usize> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::InvalidParameter(format!(
                    "support position {last} out of range for length {len}"
                )));
            }
        }
        Ok(Self { len, support })
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self {
            len: bits.len(),
            support: bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect(),
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &i in &self.support {
            bits[i] = true;
        }
        bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    pub fn xor(&self, other: &BinaryVector) -> Result<BinaryVector> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        let mut bits = self.to_bits();
        for &i in &other.support {
            bits[i] ^= true;
        }
        Ok(Self::from_bits(&bits))
    }

    /// Copy with position `i` removed from the support.
    pub fn without(&self, i: usize) -> BinaryVector {
        Self { len: self.len, support: self.support.iter().copied().filter(|&j| j != i).collect() }
    }
}
