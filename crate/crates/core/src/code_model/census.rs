//! Enumeration of connected variable subsets and the (a,b) census.

use super::TannerGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// All variable sets of size `a` whose induced subgraph has `b` odd-degree
/// checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SubgraphClassJson", from = "SubgraphClassJson")]
pub struct SubgraphClass {
    pub a: usize,
    pub b: usize,
    pub members: Vec<Vec<usize>>,
}

impl SubgraphClass {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

#[derive(Serialize, Deserialize)]
struct SubgraphClassJson {
    a: usize,
    b: usize,
    count: usize,
    members: Vec<Vec<usize>>,
}

impl From<SubgraphClass> for SubgraphClassJson {
    fn from(c: SubgraphClass) -> Self {
        Self { a: c.a, b: c.b, count: c.members.len(), members: c.members }
    }
}

impl From<SubgraphClassJson> for SubgraphClass {
    fn from(j: SubgraphClassJson) -> Self {
        Self { a: j.a, b: j.b, members: j.members }
    }
}

/// Degree of every check touched by `subset` in the induced subgraph, as
/// sorted `(check, degree)` pairs.
pub fn induced_check_degrees(g: &TannerGraph, subset: &[usize]) -> Vec<(usize, usize)> {
    let mut checks: Vec<usize> = subset.iter().flat_map(|&v| g.var_neighbors(v).iter().copied()).collect();
    checks.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in checks {
        match out.last_mut() {
            Some((last, d)) if *last == c => *d += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

/// Number of odd-degree checks in the subgraph induced by `subset`.
pub fn odd_check_count(g: &TannerGraph, subset: &[usize]) -> usize {
    induced_check_degrees(g, subset).iter().filter(|(_, d)| d % 2 == 1).count()
}

/// `(a, b)` classification of a variable set.
pub fn classify_subset(g: &TannerGraph, subset: &[usize]) -> (usize, usize) {
    (subset.len(), odd_check_count(g, subset))
}

struct Esu<'a> {
    adj: &'a [Vec<usize>],
    k: usize,
    blocked: Vec<u32>,
    sub: Vec<usize>,
}

impl Esu<'_> {
    fn block(&mut self, w: usize, delta: i32) {
        let apply = |b: &mut u32| *b = (*b as i32 + delta) as u32;
        apply(&mut self.blocked[w]);
        for &u in &self.adj[w] {
            apply(&mut self.blocked[u]);
        }
    }

    // Wernicke's ESU: each connected set is produced once, rooted at its
    // smallest member.
    fn extend(&mut self, mut ext: Vec<usize>, root: usize, visit: &mut dyn FnMut(&[usize])) {
        if self.sub.len() == self.k {
            visit(&self.sub);
            return;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &self.adj[w] {
                if u > root && self.blocked[u] == 0 {
                    next.push(u);
                }
            }
            self.block(w, 1);
            self.sub.push(w);
            self.extend(next, root, visit);
            self.sub.pop();
            self.block(w, -1);
        }
    }

    fn run_root(&mut self, root: usize, visit: &mut dyn FnMut(&[usize])) {
        self.sub.clear();
        self.sub.push(root);
        self.block(root, 1);
        let ext = self.adj[root].iter().copied().filter(|&u| u > root).collect();
        self.extend(ext, root, visit);
        self.block(root, -1);
    }
}

fn var_adjacency(g: &TannerGraph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.var_var_neighbors(v)).collect()
}

fn for_each_rooted(g: &TannerGraph, adj: &[Vec<usize>], a: usize, root: usize, visit: &mut dyn FnMut(&[usize])) {
    let mut esu = Esu { adj, k: a, blocked: vec![0; g.n()], sub: Vec::with_capacity(a) };
    esu.run_root(root, visit);
}

/// Every connected (through shared checks) variable subset of size `a`,
/// each exactly once, members sorted ascending.
pub fn enumerate_connected_subsets(g: &TannerGraph, a: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut out = Vec::new();
    if a > 0 {
        let adj = var_adjacency(g);
        for root in 0..g.n() {
            for_each_rooted(g, &adj, a, root, &mut |s| {
                let mut s = s.to_vec();
                s.sort_unstable();
                out.push(s);
            });
        }
    }
    out.into_iter()
}

/// Connected subsets of size `a` containing `v`, restricted to variables
/// accepted by `allowed`. Used by incremental construction checks.
pub fn enumerate_connected_subsets_containing(
    g: &TannerGraph,
    v: usize,
    a: usize,
    allowed: &dyn Fn(usize) -> bool,
    visit: &mut dyn FnMut(&[usize]),
) {
    if a == 0 || !allowed(v) {
        return;
    }
    // Grow from v over the allowed subgraph's adjacency; dedupe by the set.
    let mut seen = std::collections::HashSet::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![v]];
    while let Some(set) = stack.pop() {
        if set.len() == a {
            visit(&set);
            continue;
        }
        let mut frontier: Vec<usize> = set
            .iter()
            .flat_map(|&u| g.var_var_neighbors(u))
            .filter(|u| allowed(*u) && !set.contains(u))
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        for u in frontier {
            let mut next = set.clone();
            let pos = next.binary_search(&u).unwrap_err();
            next.insert(pos, u);
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
}

/// Connected variable sets of size `a` with exactly `b` odd-degree checks.
/// Roots are processed in parallel; members come out sorted.
pub fn census_trapping_subgraphs(g: &TannerGraph, a: usize, b: usize) -> SubgraphClass {
    if a == 0 {
        return SubgraphClass { a, b, members: Vec::new() };
    }
    let adj = var_adjacency(g);
    let mut members: Vec<Vec<usize>> = (0..g.n())
        .into_par_iter()
        .flat_map_iter(|root| {
            let mut found = Vec::new();
            let mut counts = vec![0u8; g.m()];
            for_each_rooted(g, &adj, a, root, &mut |s| {
                let mut odd = 0usize;
                for &v in s {
                    for &c in g.var_neighbors(v) {
                        counts[c] ^= 1;
                    }
                }
                for &v in s {
                    for &c in g.var_neighbors(v) {
                        odd += counts[c] as usize;
                        counts[c] = 0;
                    }
                }
                if odd == b {
                    let mut s = s.to_vec();
                    s.sort_unstable();
                    found.push(s);
                }
            });
            found
        })
        .collect();
    members.sort();
    SubgraphClass { a, b, members }
}

/// Brute-force census over all (not necessarily connected) subsets; only
/// practical for small `n` or `a`.
pub fn census_all_subsets(g: &TannerGraph, a: usize, b: usize) -> SubgraphClass {
    let mut members = Vec::new();
    let mut idx: Vec<usize> = (0..a).collect();
    if a == 0 || a > g.n() {
        return SubgraphClass { a, b, members };
    }
    loop {
        if odd_check_count(g, &idx) == b {
            members.push(idx.clone());
        }
        // next combination
        let mut i = a;
        loop {
            if i == 0 {
                return SubgraphClass { a, b, members };
            }
            i -= 1;
            if idx[i] < g.n() - a + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..a {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_check() -> TannerGraph {
        TannerGraph::from_check_neighbors(3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn singletons_and_pairs() {
        let g = single_check();
        assert_eq!(enumerate_connected_subsets(&g, 1).count(), 3);
        assert_eq!(enumerate_connected_subsets(&g, 2).count(), 3);
        assert_eq!(enumerate_connected_subsets(&g, 3).count(), 1);
        assert_eq!(enumerate_connected_subsets(&g, 4).count(), 0);
    }

    #[test]
    fn path_graph_subsets() {
        // v0 - v1 - v2 - v3 in a chain of checks
        let g = TannerGraph::from_check_neighbors(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let sets: Vec<_> = enumerate_connected_subsets(&g, 2).collect();
        assert_eq!(sets.len(), 3);
        assert_eq!(enumerate_connected_subsets(&g, 3).count(), 2);
    }

    #[test]
    fn classification() {
        let g = TannerGraph::from_check_neighbors(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(classify_subset(&g, &[1, 2]), (2, 2));
        assert_eq!(classify_subset(&g, &[0, 1, 2, 3]), (4, 0));
        let c = census_trapping_subgraphs(&g, 1, 1);
        assert_eq!(c.members, vec![vec![0], vec![3]]);
    }

    #[test]
    fn containing_matches_full_enumeration() {
        let g = TannerGraph::from_check_neighbors(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 5]],
        )
        .unwrap();
        for v in 0..6 {
            let mut got = Vec::new();
            enumerate_connected_subsets_containing(&g, v, 3, &|_| true, &mut |s| got.push(s.to_vec()));
            got.sort();
            let want: Vec<_> = enumerate_connected_subsets(&g, 3).filter(|s| s.contains(&v)).collect::<Vec<_>>();
            let mut want = want;
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn json_has_count() {
        let c = SubgraphClass { a: 1, b: 3, members: vec![vec![0], vec![1]] };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"a":1,"b":3,"count":2,"members":[[0],[1]]}"#);
        let back: SubgraphClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
