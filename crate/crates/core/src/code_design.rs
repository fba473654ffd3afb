//! Progressive edge growth generalized to forbidden subgraphs.
//!
//! Variables are completed one at a time. Each edge goes to a check at
//! maximal distance from the variable in the current graph (lowest check
//! degree among those, then a random tie-break), skipping checks that
//! would close a cycle shorter than the configured girth. After the last
//! edge of a variable, every connected set through it is compared against
//! the forbidden trapping-set templates; a dead end or a match removes the
//! variable's edges and retries it.

use crate::code_model::{classify_subset, enumerate_connected_subsets, enumerate_connected_subsets_containing, BinaryVector, TannerGraph};
use crate::error::{Error, Result};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_BACKTRACKS: usize = 10_000;
/// Consecutive failures on one variable before its predecessor is also undone.
const RETRIES_PER_VARIABLE: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForbiddenPattern {
    CycleShorterThan { g_min: usize },
    /// Connected variable sets with `a` members and `b` odd checks whose
    /// induced subgraph is isomorphic to `template` (a graph on `a`
    /// variables holding only the induced checks).
    TrappingTemplate { a: usize, b: usize, template: TannerGraph },
}

impl ForbiddenPattern {
    pub fn cycles_shorter_than(g_min: usize) -> Result<Self> {
        if g_min < 4 || g_min % 2 == 1 {
            return Err(Error::InvalidParameter(format!("g_min {g_min} must be even and at least 4")));
        }
        Ok(Self::CycleShorterThan { g_min })
    }

    pub fn template(template: TannerGraph) -> Result<Self> {
        if template.n() == 0 || template.n() > 8 {
            return Err(Error::InvalidParameter("templates need 1..=8 variables".into()));
        }
        let all: Vec<usize> = (0..template.n()).collect();
        let (a, b) = classify_subset(&template, &all);
        Ok(Self::TrappingTemplate { a, b, template })
    }

    /// The (5,3) trapping set of column-weight-three girth-8 codes: two
    /// variables each joined through degree-2 checks to the same three
    /// others, which carry one degree-1 check each.
    pub fn tanner_53() -> Self {
        let mut checks = Vec::new();
        for hub in [0, 1] {
            for leaf in [2, 3, 4] {
                checks.push(vec![hub, leaf]);
            }
        }
        for leaf in [2, 3, 4] {
            checks.push(vec![leaf]);
        }
        Self::template(TannerGraph::from_check_neighbors(5, checks).expect("valid template")).expect("small template")
    }
}

/// Canonical form of the subgraph induced by `vars`: the lexicographically
/// least sorted list of check neighborhoods (as bit masks) over all
/// relabelings of the variables.
fn canonical_induced(g: &TannerGraph, vars: &[usize]) -> Vec<u32> {
    let mut masks: std::collections::BTreeMap<usize, u32> = std::collections::BTreeMap::new();
    for (k, &v) in vars.iter().enumerate() {
        for &c in g.var_neighbors(v) {
            *masks.entry(c).or_insert(0) |= 1 << k;
        }
    }
    let masks: Vec<u32> = masks.into_values().collect();
    let mut perm: Vec<usize> = (0..vars.len()).collect();
    let mut best: Option<Vec<u32>> = None;
    loop {
        let mut relabeled: Vec<u32> = masks
            .iter()
            .map(|&m| (0..vars.len()).filter(|k| m >> k & 1 == 1).fold(0, |acc, k| acc | 1 << perm[k]))
            .collect();
        relabeled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            best = Some(relabeled);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.expect("at least one permutation")
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

struct TemplateMatcher {
    a: usize,
    b: usize,
    canonical: Vec<u32>,
}

impl TemplateMatcher {
    fn new(a: usize, b: usize, template: &TannerGraph) -> Self {
        let all: Vec<usize> = (0..template.n()).collect();
        Self { a, b, canonical: canonical_induced(template, &all) }
    }

    fn matches(&self, g: &TannerGraph, vars: &[usize]) -> bool {
        classify_subset(g, vars) == (self.a, self.b) && canonical_induced(g, vars) == self.canonical
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A cycle through this variable shorter than the bound.
    ShortCycle { variable: usize, length: usize },
    Embedding { variables: Vec<usize> },
}

/// All violations of `pattern` in `g`: for cycles, one entry per variable
/// on a too-short cycle with its shortest cycle length; for templates,
/// every matching variable set.
pub fn check_forbidden(g: &TannerGraph, pattern: &ForbiddenPattern) -> Vec<Violation> {
    match pattern {
        ForbiddenPattern::CycleShorterThan { g_min } => (0..g.n())
            .filter_map(|v| shortest_cycle_through(g, v).filter(|&l| l < *g_min).map(|length| Violation::ShortCycle { variable: v, length }))
            .collect(),
        ForbiddenPattern::TrappingTemplate { a, b, template } => {
            let matcher = TemplateMatcher::new(*a, *b, template);
            enumerate_connected_subsets(g, *a)
                .filter(|s| matcher.matches(g, s))
                .map(|variables| Violation::Embedding { variables })
                .collect()
        }
    }
}

/// Length of the shortest cycle through variable `v`, by BFS that tracks
/// the first edge of every path.
fn shortest_cycle_through(g: &TannerGraph, v: usize) -> Option<usize> {
    use std::collections::VecDeque;
    // Nodes: variables 0..n, checks n..n+m.
    let n = g.n();
    let total = n + g.m();
    let mut dist = vec![usize::MAX; total];
    let mut branch = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    dist[v] = 0;
    for (k, &c) in g.var_neighbors(v).iter().enumerate() {
        dist[n + c] = 1;
        branch[n + c] = k;
        queue.push_back(n + c);
    }
    let mut best = None::<usize>;
    while let Some(x) = queue.pop_front() {
        if best.is_some_and(|b| 2 * dist[x] >= b) {
            break;
        }
        let neighbors: Vec<usize> = if x < n {
            g.var_neighbors(x).iter().map(|&c| n + c).collect()
        } else {
            g.check_neighbors(x - n).to_vec()
        };
        for y in neighbors {
            if y == v {
                continue;
            }
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                branch[y] = branch[x];
                queue.push_back(y);
            } else if branch[y] != branch[x] {
                let len = dist[x] + dist[y] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub n: usize,
    pub var_degree: usize,
    pub m: usize,
    pub seed: u64,
    pub max_backtracks: usize,
}

impl ConstructionConfig {
    pub fn new(n: usize, var_degree: usize, m: usize, seed: u64) -> Self {
        Self { n, var_degree, m, seed, max_backtracks: DEFAULT_MAX_BACKTRACKS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacktrackEvent {
    pub variable: usize,
    pub reason: String,
    /// Variables whose edges were removed.
    pub undone: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionLog {
    pub seed: u64,
    pub config: ConstructionConfig,
    pub forbidden: Vec<ForbiddenPattern>,
    /// Checks chosen for each variable, in placement order.
    pub chosen_checks: Vec<Vec<usize>>,
    pub backtracks: Vec<BacktrackEvent>,
    pub check_degree_min: usize,
    pub check_degree_max: usize,
    pub check_degree_histogram: std::collections::BTreeMap<usize, usize>,
}

struct Builder {
    n: usize,
    m: usize,
    var_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
}

impl Builder {
    fn add(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c);
        self.check_adj[c].push(v);
    }

    fn clear(&mut self, v: usize) {
        for c in std::mem::take(&mut self.var_adj[v]) {
            self.check_adj[c].retain(|&u| u != v);
        }
    }

    /// Distances in edges from variable `v` to each check.
    fn check_distances(&self, v: usize) -> Vec<Option<usize>> {
        let mut var_seen = vec![false; self.n];
        let mut dist = vec![None; self.m];
        let mut frontier = vec![v];
        var_seen[v] = true;
        let mut d = 1;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for &c in &self.var_adj[u] {
                    if dist[c].is_none() {
                        dist[c] = Some(d);
                        for &w in &self.check_adj[c] {
                            if !var_seen[w] {
                                var_seen[w] = true;
                                next.push(w);
                            }
                        }
                    }
                }
            }
            frontier = next;
            d += 2;
        }
        dist
    }

    fn graph(&self) -> TannerGraph {
        TannerGraph::from_check_neighbors(self.n, self.check_adj.clone()).expect("builder keeps a simple graph")
    }
}

/// Builds a Tanner graph with uniform variable degree avoiding `forbidden`.
pub fn peg_construct<R: Rng + ?Sized>(cfg: &ConstructionConfig, forbidden: &[ForbiddenPattern], rng: &mut R) -> Result<(TannerGraph, ConstructionLog)> {
    if cfg.n == 0 || cfg.m == 0 || cfg.var_degree == 0 || cfg.var_degree > cfg.m {
        return Err(Error::InvalidParameter(format!("infeasible parameters n={}, d_v={}, m={}", cfg.n, cfg.var_degree, cfg.m)));
    }
    let g_min = forbidden
        .iter()
        .filter_map(|p| match p {
            ForbiddenPattern::CycleShorterThan { g_min } => Some(*g_min),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let templates: Vec<TemplateMatcher> = forbidden
        .iter()
        .filter_map(|p| match p {
            ForbiddenPattern::TrappingTemplate { a, b, template } => Some(TemplateMatcher::new(*a, *b, template)),
            _ => None,
        })
        .collect();

    let mut b = Builder { n: cfg.n, m: cfg.m, var_adj: vec![Vec::new(); cfg.n], check_adj: vec![Vec::new(); cfg.m] };
    let mut backtracks = Vec::new();
    let mut retries = vec![0usize; cfg.n];
    let mut v = 0;
    while v < cfg.n {
        let placed = place_variable(&mut b, v, cfg.var_degree, g_min, rng);
        let failure = match placed {
            false => Some("no admissible check".to_string()),
            true if !templates.is_empty() => {
                let g = b.graph();
                let mut hit = None;
                for t in &templates {
                    enumerate_connected_subsets_containing(&g, v, t.a, &|u| u <= v, &mut |s| {
                        if hit.is_none() && t.matches(&g, s) {
                            hit = Some(s.to_vec());
                        }
                    });
                }
                hit.map(|s| format!("forbidden template on {s:?}"))
            }
            true => None,
        };
        let Some(reason) = failure else {
            v += 1;
            continue;
        };
        if backtracks.len() >= cfg.max_backtracks {
            let done = v;
            return Err(Error::Infeasible(format!(
                "backtrack cap {} reached at variable {done} of {}; last failure: {reason}",
                cfg.max_backtracks, cfg.n
            )));
        }
        b.clear(v);
        let mut undone = vec![v];
        retries[v] += 1;
        if retries[v] > RETRIES_PER_VARIABLE && v > 0 {
            retries[v] = 0;
            v -= 1;
            b.clear(v);
            undone.push(v);
        }
        backtracks.push(BacktrackEvent { variable: undone[0], reason, undone });
    }

    let g = b.graph();
    for p in forbidden {
        let violations = check_forbidden(&g, p);
        if !violations.is_empty() {
            return Err(Error::Infeasible(format!("post-construction check found {} violations of {p:?}", violations.len())));
        }
    }
    let degrees: Vec<usize> = (0..g.m()).map(|c| g.check_degree(c)).collect();
    let mut hist = std::collections::BTreeMap::new();
    for &d in &degrees {
        *hist.entry(d).or_insert(0) += 1;
    }
    let log = ConstructionLog {
        seed: cfg.seed,
        config: cfg.clone(),
        forbidden: forbidden.to_vec(),
        chosen_checks: b.var_adj.clone(),
        backtracks,
        check_degree_min: degrees.iter().copied().min().unwrap_or(0),
        check_degree_max: degrees.iter().copied().max().unwrap_or(0),
        check_degree_histogram: hist,
    };
    Ok((g, log))
}

/// PEG placement of all edges of `v`; false on a dead end.
fn place_variable<R: Rng + ?Sized>(b: &mut Builder, v: usize, d_v: usize, g_min: usize, rng: &mut R) -> bool {
    for _ in 0..d_v {
        let dist = b.check_distances(v);
        // Unreachable checks count as infinitely far.
        let far = |c: usize| dist[c].map_or(usize::MAX, |d| d);
        let admissible: Vec<usize> = (0..b.m)
            .filter(|&c| !b.var_adj[v].contains(&c))
            .filter(|&c| dist[c].is_none_or(|d| d + 1 >= g_min))
            .collect();
        let Some(max_far) = admissible.iter().map(|&c| far(c)).max() else {
            return false;
        };
        let farthest: Vec<usize> = admissible.into_iter().filter(|&c| far(c) == max_far).collect();
        let min_deg = farthest.iter().map(|&c| b.check_adj[c].len()).min().expect("nonempty");
        let lightest: Vec<usize> = farthest.into_iter().filter(|&c| b.check_adj[c].len() == min_deg).collect();
        let &c = lightest.choose(rng).expect("nonempty");
        b.add(v, c);
    }
    true
}

/// Random codeword weights found by sampling information sets: each sample
/// draws a random column order, reduces the parity-check matrix, and
/// reports the weights of the resulting null-space basis vectors. Only an
/// upper-bound spot check on the minimum distance.
pub fn codeword_weight_spot_check<R: Rng + ?Sized>(g: &TannerGraph, samples: usize, rng: &mut R) -> Vec<usize> {
    use crate::code_model::BitMatrix;
    use rand::seq::SliceRandom;
    let mut weights = Vec::new();
    for _ in 0..samples {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(rng);
        let permuted = g.relabel(&perm, &(0..g.m()).collect::<Vec<_>>()).expect("valid permutation");
        let h = BitMatrix::parity_check(&permuted);
        for v in h.null_space() {
            let w = v.weight();
            if g.is_codeword(&BinaryVector::from_support(g.n(), v.support().iter().map(|&i| inverse(&perm, i))).expect("in range")).unwrap_or(false) {
                weights.push(w);
            }
        }
    }
    weights.sort_unstable();
    weights
}

fn inverse(perm: &[usize], i: usize) -> usize {
    perm.iter().position(|&p| p == i).expect("permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::build_tanner_155;

    #[test]
    fn pure_peg_girth_six() {
        let cfg = ConstructionConfig::new(40, 3, 20, 1);
        let forbidden = [ForbiddenPattern::cycles_shorter_than(6).unwrap()];
        let (g, log) = peg_construct(&cfg, &forbidden, &mut crate::seeded_rng(1)).unwrap();
        assert!(g.girth().unwrap_or(usize::MAX) >= 6);
        assert_eq!(g.uniform_var_degree(), Some(3));
        assert_eq!(log.chosen_checks.len(), 40);
    }

    #[test]
    fn deterministic() {
        let cfg = ConstructionConfig::new(30, 3, 15, 2);
        let f = [ForbiddenPattern::cycles_shorter_than(6).unwrap()];
        let a = peg_construct(&cfg, &f, &mut crate::seeded_rng(2)).unwrap().0;
        let b = peg_construct(&cfg, &f, &mut crate::seeded_rng(2)).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn tanner_53_template_matches_census() {
        let g = build_tanner_155();
        assert_eq!(check_forbidden(&g, &ForbiddenPattern::tanner_53()).len(), 155);
        assert!(check_forbidden(&g, &ForbiddenPattern::cycles_shorter_than(8).unwrap()).is_empty());
        let v = check_forbidden(&g, &ForbiddenPattern::cycles_shorter_than(10).unwrap());
        assert_eq!(v.len(), 155);
        assert!(v.iter().all(|x| matches!(x, Violation::ShortCycle { length: 8, .. })));
    }

    #[test]
    fn canonical_form_is_label_free() {
        let t = match ForbiddenPattern::tanner_53() {
            ForbiddenPattern::TrappingTemplate { template, .. } => template,
            _ => unreachable!(),
        };
        let all: Vec<usize> = (0..5).collect();
        let r = t.relabel(&[4, 2, 0, 1, 3], &(0..t.m()).rev().collect::<Vec<_>>()).unwrap();
        assert_eq!(canonical_induced(&t, &all), canonical_induced(&r, &all));
    }

    #[test]
    fn infeasible_reports() {
        let cfg = ConstructionConfig { max_backtracks: 5, ..ConstructionConfig::new(30, 3, 6, 0) };
        let f = [ForbiddenPattern::cycles_shorter_than(8).unwrap()];
        assert!(matches!(peg_construct(&cfg, &f, &mut crate::seeded_rng(0)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn spot_check_finds_codewords() {
        let g = build_tanner_155();
        let w = codeword_weight_spot_check(&g, 1, &mut crate::seeded_rng(4));
        assert_eq!(w.len(), 64);
        assert!(w[0] >= 20);
    }
}
