use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gwsym::interaction::{enumerate_all, i_term, total_symbol, NumericOracle};
use gwsym::ricci::FormFamily;
use gwsym::{standard_config, Evaluator};
use std::hint::black_box;
use std::time::Duration;

fn derivation(c: &mut Criterion) {
    c.bench_function("derive_form_family", |b| b.iter(|| black_box(FormFamily::derive())));
}

fn single_term(c: &mut Criterion) {
    let config = standard_config();
    let term = i_term([1, 2, 3]);
    c.bench_function("exact_single_term", |b| {
        b.iter_batched(
            || Evaluator::new(&config),
            |ev| black_box(ev.contribution(&term).unwrap()),
            BatchSize::SmallInput,
        )
    });
    let oracle = NumericOracle::standard(&config, 2.0);
    c.bench_function("oracle_single_term", |b| {
        b.iter(|| black_box(oracle.contribution(&term)))
    });
}

fn total(c: &mut Criterion) {
    let config = standard_config();
    let mut group = c.benchmark_group("total_symbol");
    group.sample_size(10);
    group.bench_function("exact", |b| {
        b.iter_batched(
            || Evaluator::new(&config),
            |ev| black_box(total_symbol(&ev).unwrap()),
            BatchSize::PerIteration,
        )
    });
    let terms = enumerate_all();
    let oracle = NumericOracle::standard(&config, 2.0);
    group.bench_function("oracle", |b| b.iter(|| black_box(oracle.sum(&terms))));
    group.finish();
}

fn short_warmup() -> Criterion {
    Criterion::default().warm_up_time(Duration::from_secs(1))
}

criterion_group! {
    name = benches;
    config = short_warmup();
    targets = derivation, single_term, total
}
criterion_main!(benches);
