use criterion::{criterion_group, criterion_main, Criterion};
use errorfloor::code_model::{build_tanner_155, census_trapping_subgraphs};
use errorfloor::lp_decode::build_lclp;
use errorfloor::{BinaryVector, ChannelModel, IterConfig, LlrVector};
use std::hint::black_box;

fn flips(n: usize, k: usize, seed: u64) -> BinaryVector {
    let mut rng = errorfloor::seeded_rng(seed);
    BinaryVector::from_support(n, rand::seq::index::sample(&mut rng, n, k).into_vec()).unwrap()
}

fn lp(c: &mut Criterion) {
    let g = build_tanner_155();
    let inst = build_lclp(&g).unwrap();
    let y4 = LlrVector::from_bsc_magnitude(&flips(155, 4, 1), 1.0);
    let y20 = LlrVector::from_bsc_magnitude(&flips(155, 20, 2), 1.0);
    c.bench_function("lp_tanner155_4_flips", |b| b.iter(|| inst.solve(black_box(&y4)).unwrap()));
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("lp_tanner155_20_flips", |b| b.iter(|| inst.solve(black_box(&y20)).unwrap()));
    group.finish();
}

fn iterative(c: &mut Criterion) {
    let g = build_tanner_155();
    let y = flips(155, 6, 3);
    let ga = IterConfig::gallager_a(50);
    c.bench_function("gallager_a_tanner155", |b| b.iter(|| ga.decode_llr(&g, &LlrVector::from_bsc_magnitude(black_box(&y), 1.0)).unwrap()));
    let ch = ChannelModel::awgn_from_ebn0_db(3.0, 64.0 / 155.0).unwrap();
    let out = ch.sample_zero_codeword(155, &mut errorfloor::seeded_rng(4));
    let llr = ch.llr(&out).unwrap();
    let bp = IterConfig::bp(50);
    let ms = IterConfig::min_sum(50);
    c.bench_function("bp_tanner155", |b| b.iter(|| bp.decode_llr(&g, black_box(&llr)).unwrap()));
    c.bench_function("min_sum_tanner155", |b| b.iter(|| ms.decode_llr(&g, black_box(&llr)).unwrap()));
}

fn census(c: &mut Criterion) {
    let g = build_tanner_155();
    let mut group = c.benchmark_group("slow_census");
    group.sample_size(10);
    group.bench_function("census_5_3", |b| b.iter(|| census_trapping_subgraphs(black_box(&g), 5, 3)));
    group.finish();
}

criterion_group!(benches, lp, iterative, census);
criterion_main!(benches);
