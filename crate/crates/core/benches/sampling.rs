use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_jacobi::fixtures::{self, random};
use dirac_jacobi::groupoid::{extract_lm, pair_theta_model};
use dirac_jacobi::structures::{check_involutivity, construct_l_theta};
use dirac_jacobi::symcalc::{is_zero, Expr, SamplingPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn modes() -> [(&'static str, SamplingPolicy); 2] {
    let base = SamplingPolicy::default();
    [("parallel", base.clone()), ("sequential", base.sequential())]
}

fn bench_is_zero(c: &mut Criterion) {
    let m = fixtures::space();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let e = random::expression(&mut rng, &m, 3);
    let zero = e.sin().powi(2) + e.cos().powi(2) - Expr::one();
    let mut group = c.benchmark_group("is_zero");
    for (name, pol) in modes() {
        let pol = pol.with_count(200);
        group.bench_with_input(BenchmarkId::from_parameter(name), &zero, |b, z: &Expr| b.iter(|| is_zero(z, &pol)));
    }
    group.finish();
}

fn bench_involutivity(c: &mut Criterion) {
    let l = construct_l_theta(&fixtures::contact_theta()).expect("contact structure");
    let mut group = c.benchmark_group("check_involutivity");
    for (name, pol) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &l, |b, l| b.iter(|| check_involutivity(l, &pol)));
    }
    group.finish();
}

fn bench_extract(c: &mut Criterion) {
    let (gm, pd) = pair_theta_model(&fixtures::contact_theta()).expect("pair model");
    let lt = construct_l_theta(&fixtures::contact_theta()).expect("contact structure");
    let mut group = c.benchmark_group("extract_lm");
    group.sample_size(20);
    for (name, pol) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| extract_lm(&gm, &pd, Some(&lt), &pol)));
    }
    group.finish();
}

criterion_group!(benches, bench_is_zero, bench_involutivity, bench_extract);
criterion_main!(benches);
