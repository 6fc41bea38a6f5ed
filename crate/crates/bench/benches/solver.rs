use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use theta_guide::search::{dfs_search, heuristic_dive, lds_search, CpModel, SearchLimits};
use theta_guide::{build_theta3, extract_scores, random_graph, solve, solve_hybrid, SolveConfig, SolveOptions};
use theta_guide_bench::clique_instance;

fn ipm(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta3_ipm");
    group.sample_size(10);
    for name in ["johnson8-2-4", "hamming6-2", "johnson8-4-4"] {
        let problem = build_theta3(&clique_instance(name)).unwrap();
        let options = SolveOptions::new(1e-8, 100);
        group.bench_with_input(BenchmarkId::from_parameter(name), &problem, |b, p| {
            b.iter(|| solve(black_box(p), &options))
        });
    }
    group.finish();
}

fn cp_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("dfs_random_n40");
    group.sample_size(10);
    for density in [0.15, 0.35, 0.65] {
        let model = CpModel::new(random_graph(40, density, false, 1).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(density), &model, |b, m| {
            b.iter(|| dfs_search(black_box(m), &SearchLimits::default()))
        });
    }
    group.finish();
}

fn guided_search(c: &mut Criterion) {
    let g = random_graph(60, 0.1, false, 3).unwrap();
    let problem = build_theta3(&g).unwrap();
    let sol = solve(&problem, &SolveOptions::new(1e-8, 100));
    let scores = extract_scores(&sol, &problem).unwrap();
    let model = CpModel::new(g.clone());
    let (_, path) = heuristic_dive(&model, &scores, 0);

    let mut group = c.benchmark_group("guided");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    group.bench_function("dive_n60", |b| b.iter(|| heuristic_dive(black_box(&model), &scores, 0)));
    group.bench_function("lds_budget2_n60", |b| {
        b.iter(|| lds_search(black_box(&model), &path, Some(2), None, &SearchLimits::default()))
    });
    let sparse = random_graph(60, 0.05, false, 0).unwrap();
    group.bench_function("sdp_cp_n60_d005", |b| {
        b.iter(|| solve_hybrid(black_box(&sparse), &SolveConfig::default()))
    });
    group.finish();
}

criterion_group!(benches, ipm, cp_search, guided_search);
criterion_main!(benches);
