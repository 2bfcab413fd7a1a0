use std::path::PathBuf;

use chunkcat::harness::{self, Presentation};
use chunkcat::{Dataset, DatasetManifest, Execution, Model, RunConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn load(name: &str) -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/suites").join(name).join("manifest.toml");
    DatasetManifest::load(&path).unwrap().load_dataset(Execution::Sequential).unwrap()
}

fn modes() -> Vec<Execution> {
    let mut m = vec![Execution::Sequential];
    if Execution::is_parallel_available() {
        m.push(Execution::Parallel);
    }
    m
}

fn suite_categorisation(c: &mut Criterion) {
    let d = load("synthetic");
    let labels: Vec<String> = d.manifest.labels().iter().map(|s| s.to_string()).collect();
    let mut model = Model::new(RunConfig::default());
    harness::train(&mut model, &d.train, Presentation::Shuffled).unwrap();
    let mut g = c.benchmark_group("run_suite");
    for exec in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| harness::run_suite(&model, &labels, &d.test, exec))
        });
    }
    g.finish();
}

fn seed_sweep(c: &mut Criterion) {
    let d = load("five_four");
    let seeds: Vec<u64> = (0..64).collect();
    let mut g = c.benchmark_group("seed_sweep");
    for exec in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| harness::seed_sweep(&d, &RunConfig::default(), &seeds, exec).unwrap())
        });
    }
    g.finish();
}

fn corpus_loading(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/suites/synthetic/manifest.toml");
    let manifest = DatasetManifest::load(&path).unwrap();
    let mut g = c.benchmark_group("load_dataset");
    for exec in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| manifest.load_dataset(exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, suite_categorisation, seed_sweep, corpus_loading);
criterion_main!(benches);
