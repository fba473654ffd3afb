mod common;

use errorfloor::code_model::BinaryVector;
use errorfloor::lp_decode::{build_lclp, cost, median, w_awgn, w_bsc};
use errorfloor::{LlrVector, PseudoCodeword, TannerGraph};
use proptest::prelude::*;
use rand::Rng;

fn random_gamma(seed: u64, n: usize) -> LlrVector {
    let mut rng = errorfloor::seeded_rng(seed);
    LlrVector::new((0..n).map(|_| rng.random_range(-1.0..2.0)).collect()).unwrap()
}

/// Minimum of `Σ γ_i x_i` over all codewords, by enumeration.
fn ml_cost(g: &TannerGraph, gamma: &[f64]) -> f64 {
    common::all_words(g.n())
        .filter(|x| g.is_codeword_bits(x))
        .map(|x| x.iter().zip(gamma).filter(|(b, _)| **b).map(|(_, v)| v).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Rows `a·f <= b` of the polytope in the forbidden-set form: for every
/// check and odd subset `S` of its neighbors,
/// `Σ_S f - Σ_{N \ S} f <= |S| - 1`, plus the unit box.
fn forbidden_set_rows(g: &TannerGraph) -> Vec<(Vec<f64>, f64)> {
    let n = g.n();
    let mut rows = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        rows.push((a.clone(), 1.0));
        a[i] = -1.0;
        rows.push((a, 0.0));
    }
    for c in 0..g.m() {
        let nb = g.check_neighbors(c);
        for mask in 0u32..1 << nb.len() {
            if mask.count_ones() % 2 == 1 {
                let mut a = vec![0.0; n];
                for (k, &v) in nb.iter().enumerate() {
                    a[v] = if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
                }
                rows.push((a, mask.count_ones() as f64 - 1.0));
            }
        }
    }
    rows
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[r][k] -= f * a[col][k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum cost over the nonzero vertices and over all vertices, by
/// solving every square subsystem of active rows.
fn vertex_oracle(g: &TannerGraph, gamma: &[f64]) -> (f64, f64) {
    let rows = forbidden_set_rows(g);
    let n = g.n();
    let (mut best, mut best_nonzero) = (f64::INFINITY, f64::INFINITY);
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a = pick.iter().map(|&r| rows[r].0.clone()).collect();
        let b = pick.iter().map(|&r| rows[r].1).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = rows.iter().all(|(a, b)| a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
            if feasible {
                let c: f64 = x.iter().zip(gamma).map(|(p, q)| p * q).sum();
                best = best.min(c);
                if x.iter().any(|v| v.abs() > 1e-9) {
                    best_nonzero = best_nonzero.min(c);
                }
            }
        }
        // Next n-combination of row indices.
        let Some(i) = (0..n).rev().find(|&i| pick[i] < rows.len() - n + i) else {
            break;
        };
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
    (best, best_nonzero)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integral_outputs_are_ml(seed: u64, n in 4usize..=12, m in 2usize..=6) {
        let g = common::random_graph(seed, n, m, 5);
        let inst = build_lclp(&g).unwrap();
        let gamma = random_gamma(seed ^ 11, n);
        let r = inst.solve(&gamma).unwrap();
        let ml = ml_cost(&g, gamma.values());
        // The polytope contains every codeword.
        prop_assert!(r.objective <= ml + 1e-9);
        prop_assert!(r.objective <= 1e-12);
        prop_assert!(inst.max_violation(r.pseudo_codeword.values(), &r.local_weights).unwrap() <= 1e-8);
        if r.integral {
            let bits: Vec<bool> = r.pseudo_codeword.values().iter().map(|&x| x > 0.5).collect();
            prop_assert!(g.is_codeword_bits(&bits));
            prop_assert!((r.objective - ml).abs() <= 1e-9 * (1.0 + ml.abs()));
        }
        for lambda in [0.1, 10.0] {
            let s = inst.solve(&gamma.scaled(lambda)).unwrap();
            prop_assert!(s.pseudo_codeword.distance(&r.pseudo_codeword).unwrap() <= 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_matches_vertex_enumeration(seed: u64, n in 3usize..=6, m in 1usize..=3) {
        let g = common::random_graph(seed, n, m, 3);
        let inst = build_lclp(&g).unwrap();
        let gamma = random_gamma(seed ^ 5, n);
        let r = inst.solve(&gamma).unwrap();
        let (best, best_nonzero) = vertex_oracle(&g, gamma.values());
        prop_assert!((r.objective - best).abs() <= 1e-7, "lp {} oracle {}", r.objective, best);
        // Failure criterion: the output is nonzero iff a nonzero vertex
        // has cost below zero (ties at zero are skipped).
        if best_nonzero.abs() > 1e-9 {
            prop_assert_eq!(!r.pseudo_codeword.is_zero(), best_nonzero < 0.0);
        }
    }
}

fn ranked(p: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    idx
}

fn w_bsc_ref(p: &[f64]) -> usize {
    let total: f64 = p.iter().sum();
    let r = ranked(p);
    let mut acc = 0.0;
    for (k, &i) in r.iter().enumerate() {
        acc += p[i];
        if acc * 2.0 == total {
            return 2 * (k + 1);
        }
        if acc * 2.0 > total {
            return 2 * (k + 1) - 1;
        }
    }
    unreachable!()
}

fn w_awgn_ref(p: &[f64]) -> f64 {
    p.iter().sum::<f64>().powi(2) / p.iter().map(|x| x * x).sum::<f64>()
}

/// Dyadic entries keep the half-total comparison exact in both versions.
fn dyadic_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=16, 1..30).prop_filter("nonzero", |v| v.iter().any(|&x| x > 0)).prop_map(|v| v.into_iter().map(|x| x as f64 / 16.0).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn weights_of_codeword_indicators(bits in prop::collection::vec(any::<bool>(), 1..40)) {
        prop_assume!(bits.iter().any(|&b| b));
        let p = PseudoCodeword::from_binary(&BinaryVector::from_bits(&bits));
        let d = bits.iter().filter(|&&b| b).count();
        prop_assert_eq!(w_bsc(&p).unwrap(), d);
        prop_assert_eq!(w_awgn(&p).unwrap(), d as f64);
    }

    #[test]
    fn weights_match_reference(v in dyadic_vector()) {
        let p = PseudoCodeword::new(v.clone()).unwrap();
        prop_assert_eq!(w_bsc(&p).unwrap(), w_bsc_ref(&v));
        let a = w_awgn(&p).unwrap();
        prop_assert!((a - w_awgn_ref(&v)).abs() <= 1e-12 * a);
        let w = w_bsc_ref(&v);
        let e = (w + 2) / 2;
        let expected: Vec<usize> = {
            let mut s: Vec<usize> = ranked(&v).into_iter().take(e).collect();
            s.sort_unstable();
            s
        };
        let m = median(&p).unwrap();
        prop_assert_eq!(m.support(), &expected[..]);
        // The median's BSC input has cost at most zero against p.
        let gamma = LlrVector::from_bsc_magnitude(&m, 1.0);
        prop_assert!(cost(&gamma, &p).unwrap() <= 1e-12);
    }
}
