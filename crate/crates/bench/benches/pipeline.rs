use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use thetarecon_core::pipeline::{generate, reconstruct, GenerateParams};
use thetarecon_core::recovery::recover_phi;
use thetarecon_core::steiner::wedge_points;
use thetarecon_core::verify::graded_ideal_dim;

fn params(genus: usize, seed: u64) -> GenerateParams {
    GenerateParams {
        genus,
        branch: None,
        seed,
        witness_count: 20,
    }
}

fn bench_generate(c: &mut Criterion) {
    c.bench_function("generate_g4", |b| {
        b.iter(|| generate(black_box(&params(4, 1))).unwrap())
    });
}

fn bench_recover(c: &mut Criterion) {
    let mut group = c.benchmark_group("recover_phi");
    for g in [3usize, 4] {
        let inp = generate(&params(g, 1)).unwrap();
        let pts = wedge_points(&inp, &()).unwrap();
        group.bench_function(format!("g{g}"), |b| {
            b.iter(|| recover_phi(black_box(&pts), &inp.ctx, 0, 64, &()).unwrap())
        });
    }
    group.finish();
}

fn bench_full(c: &mut Criterion) {
    let inp = generate(&params(3, 1)).unwrap();
    c.bench_function("reconstruct_g3", |b| {
        b.iter_batched(
            || inp.clone(),
            |inp| reconstruct(&inp, 0, 64, &()).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_graded(c: &mut Criterion) {
    let inp = generate(&params(4, 1)).unwrap();
    let rec = reconstruct(&inp, 0, 64, &()).unwrap();
    c.bench_function("graded_dim_g4_d4", |b| {
        b.iter(|| graded_ideal_dim(black_box(&rec.quadrics), 4, &()).unwrap())
    });
}

criterion_group!(benches, bench_generate, bench_recover, bench_full, bench_graded);
criterion_main!(benches);
