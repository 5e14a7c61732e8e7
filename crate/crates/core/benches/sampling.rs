use chaoscalc::simulation::{counterexample_chaos, counterexample_direct, sample};
use chaoscalc::{ChaosElement, Execution, SymmetricKernel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn random_element(d: usize) -> ChaosElement {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let kernels: Vec<_> = (1..=4).map(|q| SymmetricKernel::random(d, q, &mut rng)).collect();
    ChaosElement::from_parts(d, 0.0, kernels).unwrap()
}

fn bench_sample(c: &mut Criterion) {
    let f = random_element(4);
    let mut g = c.benchmark_group("sample_order4_d4");
    for n in [10_000usize, 100_000] {
        g.throughput(Throughput::Elements(n as u64));
        for (name, exec) in STRATEGIES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| sample(&f, n, 7, exec).unwrap()));
        }
    }
    g.finish();
}

fn bench_counterexample(c: &mut Criterion) {
    let n = 100_000;
    let mut g = c.benchmark_group("counterexample");
    g.throughput(Throughput::Elements(n as u64));
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new("direct", name), |b| {
            b.iter(|| counterexample_direct(n, 3, exec).unwrap())
        });
    }
    let (_, y) = counterexample_chaos(9, 21).unwrap();
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::new("chaos_k9", name), |b| b.iter(|| sample(&y, n, 3, exec).unwrap()));
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_sample, bench_counterexample
}
criterion_main!(benches);
