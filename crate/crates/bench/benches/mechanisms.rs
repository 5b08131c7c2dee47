use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use affirm_bench::uniform_sample;
use affirm_core::{run_mechanism, Mechanism, Regime};

fn bench_mechanisms(c: &mut Criterion) {
    let mut group = c.benchmark_group("mechanism");
    for n in [100, 1_000, 10_000] {
        let sample = uniform_sample(n, 7);
        for mechanism in [Mechanism::Iam, Mechanism::Ttc] {
            for regime in [Regime::Quota, Regime::Reserve] {
                let market = sample.view(regime);
                group.bench_with_input(
                    BenchmarkId::new(mechanism.label(regime), n),
                    market,
                    |b, m| b.iter(|| run_mechanism(mechanism, m).expect("valid")),
                );
            }
        }
    }
    group.finish();
}

criterion_group!(benches, bench_mechanisms);
criterion_main!(benches);
