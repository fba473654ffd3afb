mod common;

use errorfloor::code_model::BitMatrix;
use errorfloor::{Algorithm, BinaryVector, ChannelModel, ChannelOutput, IterConfig, LlrVector, TannerGraph};
use proptest::prelude::*;
use rand::Rng;

fn random_codeword(g: &TannerGraph, seed: u64) -> BinaryVector {
    let mut rng = errorfloor::seeded_rng(seed);
    let mut c = BinaryVector::zeros(g.n());
    for b in BitMatrix::parity_check(g).null_space() {
        if rng.random_bool(0.5) {
            c = c.xor(&b).unwrap();
        }
    }
    c
}

fn random_llr(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = errorfloor::seeded_rng(seed);
    (0..n).map(|_| rng.random_range(-2.0..3.0)).collect()
}

fn configs() -> Vec<IterConfig> {
    vec![IterConfig::gallager_a(20), IterConfig::gallager_b(20, Default::default()), IterConfig::bp(20), IterConfig::min_sum(20)]
}

/// Random forest: each check joins one earlier variable to fresh ones.
fn random_forest(seed: u64, n: usize, m: usize) -> TannerGraph {
    let mut rng = errorfloor::seeded_rng(seed);
    let mut next = 1;
    let mut checks = Vec::new();
    for _ in 0..m {
        if next >= n {
            break;
        }
        let fresh = rng.random_range(1..=2).min(n - next);
        let mut c = vec![rng.random_range(0..next)];
        c.extend(next..next + fresh);
        next += fresh;
        checks.push(c);
    }
    TannerGraph::from_check_neighbors(n, checks).unwrap()
}

fn check_symmetry(g: &TannerGraph, seed: u64, algorithms: &[Algorithm]) -> Result<(), TestCaseError> {
    let c = random_codeword(g, seed ^ 3);
    let gamma = random_llr(seed, g.n());
    let shifted: Vec<f64> = gamma.iter().enumerate().map(|(i, &v)| if c.get(i) { -v } else { v }).collect();
    for cfg in configs().into_iter().filter(|c| algorithms.contains(&c.algorithm)) {
        let t0 = cfg.decode_llr(g, &LlrVector::new(gamma.clone()).unwrap()).unwrap();
        let t1 = cfg.decode_llr(g, &LlrVector::new(shifted.clone()).unwrap()).unwrap();
        prop_assert_eq!(t0.halted_at, t1.halted_at);
        prop_assert_eq!(t0.decisions.len(), t1.decisions.len());
        for (x0, x1) in t0.decisions.iter().zip(&t1.decisions) {
            prop_assert_eq!(&x0.xor(&c).unwrap(), x1, "{:?}", cfg.algorithm);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bsc_llr_signs_follow_support(seed: u64, eps in 0.001f64..0.49) {
        let mut rng = errorfloor::seeded_rng(seed);
        let bits: Vec<bool> = (0..30).map(|_| rng.random_bool(0.3)).collect();
        let y = BinaryVector::from_bits(&bits);
        let llr = ChannelModel::bsc(eps).unwrap().llr(&ChannelOutput::Bsc(y)).unwrap();
        let mag = ((1.0 - eps) / eps).ln();
        for (v, &b) in llr.values().iter().zip(&bits) {
            prop_assert!((v.abs() - mag).abs() <= 1e-12 * mag);
            prop_assert_eq!(*v < 0.0, b);
        }
    }

    #[test]
    fn bsc_log_probability_decreases_with_weight(eps in 0.001f64..0.49, w in 0usize..29) {
        let ch = ChannelModel::bsc(eps).unwrap();
        let lp = |k: usize| ch.log_probability(&ChannelOutput::Bsc(BinaryVector::from_support(30, 0..k).unwrap())).unwrap();
        prop_assert!(lp(w + 1) < lp(w));
    }

    #[test]
    fn awgn_log_probability_orders_by_noise_norm(sigma in 0.2f64..2.0, seed: u64) {
        let ch = ChannelModel::awgn(sigma).unwrap();
        let a = random_llr(seed, 12);
        let b = random_llr(seed ^ 7, 12);
        let norm = |y: &[f64]| y.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>();
        let la = ch.log_probability(&ChannelOutput::Awgn(a.clone())).unwrap();
        let lb = ch.log_probability(&ChannelOutput::Awgn(b.clone())).unwrap();
        let (na, nb) = (norm(&a), norm(&b));
        if (na - nb).abs() > 1e-9 {
            prop_assert_eq!(la > lb, na < nb);
        }
        prop_assert!(((la - lb) - (nb - na) / (2.0 * sigma * sigma)).abs() < 1e-9 * (1.0 + la.abs()));
    }

    #[test]
    fn decoding_is_deterministic(seed: u64) {
        let g = common::random_graph(seed, 12, 6, 5);
        let llr = LlrVector::new(random_llr(seed, 12)).unwrap();
        for cfg in configs() {
            prop_assert_eq!(cfg.decode_llr(&g, &llr).unwrap(), cfg.decode_llr(&g, &llr).unwrap());
        }
    }

    #[test]
    fn codeword_symmetry(seed: u64) {
        // Min-sum passes channel values themselves around cycles, so exact
        // zero posteriors (whose tie-break is not sign-symmetric) occur
        // with positive probability; it is checked on forests only.
        let cyclic = common::random_graph(seed, 12, 5, 5);
        check_symmetry(&cyclic, seed, &[Algorithm::GallagerA, Algorithm::GallagerB, Algorithm::Bp])?;
        let forest = random_forest(seed, 12, 6);
        check_symmetry(&forest, seed, &[Algorithm::GallagerA, Algorithm::Bp, Algorithm::MinSum])?;
    }

    #[test]
    fn hard_and_min_sum_scale_invariant(seed: u64, k in -3i32..4) {
        let g = common::random_graph(seed, 12, 6, 5);
        let gamma = LlrVector::new(random_llr(seed, 12)).unwrap();
        let lambda = 2f64.powi(k);
        for cfg in configs().into_iter().filter(|c| c.algorithm != Algorithm::Bp) {
            let a = cfg.decode_llr(&g, &gamma).unwrap();
            let b = cfg.decode_llr(&g, &gamma.scaled(lambda)).unwrap();
            prop_assert_eq!(a.decisions, b.decisions);
        }
    }

    #[test]
    fn early_halt_only_on_codewords(seed: u64) {
        let g = common::random_graph(seed, 12, 6, 5);
        let gamma = LlrVector::new(random_llr(seed, 12)).unwrap();
        for cfg in configs() {
            let t = cfg.decode_llr(&g, &gamma).unwrap();
            if let Some(k) = t.halted_at {
                prop_assert!(g.is_codeword(&t.decisions[k]).unwrap());
                prop_assert_eq!(t.decisions.len(), k + 1);
            }
        }
    }
}
