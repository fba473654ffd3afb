#![allow(dead_code)]

use errorfloor::TannerGraph;
use rand::seq::index::sample;
use rand::Rng;

/// Random Tanner graph with `n` variables and `m` checks of degree
/// `2..=max_deg`; some variables may be left without checks.
pub fn random_graph(seed: u64, n: usize, m: usize, max_deg: usize) -> TannerGraph {
    let mut rng = errorfloor::seeded_rng(seed);
    let checks = (0..m)
        .map(|_| {
            let d = rng.random_range(2..=max_deg.min(n));
            sample(&mut rng, n, d).into_vec()
        })
        .collect();
    TannerGraph::from_check_neighbors(n, checks).unwrap()
}

pub fn all_words(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |x| (0..n).map(|i| x >> i & 1 == 1).collect())
}
