//! Sequential (one-thread pool) against the default rayon pool on the hot
//! paths. Outputs are identical either way; only wall time differs.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use east_core::automaton::{run_ensemble, Chain, RunOptions};
use east_core::entanglement::{separable_census, zero_entropy_scan, ZERO_ENTROPY_TOL};
use east_core::fragmentation::largest_sector;
use east_core::spectral::diagonalize;
use east_core::{build_hamiltonian, AssemblyMode, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;

fn pools() -> Vec<(String, ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let name = format!("pool{}", default.current_num_threads());
    vec![("sequential".into(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()), (name, default)]
}

fn bench(c: &mut Criterion) {
    let spec = ModelSpec::uniform(2).unwrap();
    let b22 = largest_sector(22, 8, &spec).unwrap();
    let h22 = build_hamiltonian(&b22, &spec, AssemblyMode::Strict).unwrap();
    let x: Vec<f64> = (0..h22.dim()).map(|k| ((k * 7919) % 1000) as f64 / 1000.0).collect();

    let b13 = largest_sector(13, 5, &spec).unwrap();
    let es13 = diagonalize(&build_hamiltonian(&b13, &spec, AssemblyMode::Strict).unwrap()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chains: Vec<Chain> = (0..16)
        .map(|_| {
            let mut ch = Chain::domain_wall(298, 100).unwrap();
            for i in 2..=100 {
                if rng.gen_bool(0.2) {
                    ch.set(i, false);
                    ch.set(100 + i, true);
                }
            }
            ch
        })
        .collect();

    let mut g = c.benchmark_group("parallel");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("apply_L22", &name), &pool, |bn, p| {
            p.install(|| bn.iter(|| h22.apply(&x).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("assemble_L22", &name), &pool, |bn, p| {
            p.install(|| bn.iter(|| build_hamiltonian(&b22, &spec, AssemblyMode::Strict).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("scan_L13", &name), &pool, |bn, p| {
            p.install(|| bn.iter(|| zero_entropy_scan(&es13, &b13, ZERO_ENTROPY_TOL).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("census_L16", &name), &pool, |bn, p| {
            p.install(|| bn.iter(|| separable_census(16, 6, &spec).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("automaton_ensemble", &name), &pool, |bn, p| {
            let opts = RunOptions { record_map: false, ..RunOptions::default() };
            p.install(|| bn.iter(|| run_ensemble(&chains, 2000, &opts).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
