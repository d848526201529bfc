use std::collections::BTreeSet;
use std::hint::black_box;

use aad_core::harness::{build_benchmark, run_eval, SamplingKind};
use aad_core::{generate, object_question, DecodingConfig, ToyProvider, ToyWorld};
use criterion::{criterion_group, criterion_main, Criterion};

fn pipeline(c: &mut Criterion) {
    let world = ToyWorld::synthetic(6, 7).unwrap();
    let present: BTreeSet<&str> = ["dog", "rain"].into();
    let audio = world.render_scene(&present).unwrap();
    let question = object_question("cat");

    let mut group = c.benchmark_group("pipeline");
    let terse = ToyProvider::new(world.clone());
    let verbose = ToyProvider::new(world.clone()).verbose(true);
    let config = DecodingConfig::default();
    group.bench_function("generate/short", |b| {
        b.iter(|| generate(&terse, black_box(&audio), &question, &config).unwrap())
    });
    group.bench_function("generate/verbose", |b| {
        b.iter(|| generate(&verbose, black_box(&audio), &question, &config).unwrap())
    });
    group.bench_function("render_and_hear", |b| {
        b.iter(|| world.hear(&world.render_scene(black_box(&present)).unwrap()))
    });

    let dataset = build_benchmark(&world, 200, SamplingKind::Random, 7).unwrap();
    let eval_config = DecodingConfig::default().with_record_steps(false);
    group.sample_size(20);
    group.bench_function("run_eval/200 items", |b| {
        b.iter(|| run_eval(&dataset, &terse, &eval_config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
