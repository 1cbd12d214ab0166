use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hitroute_core::fuzzy::{km_reduce, Universe};
use hitroute_core::hierarchy::flatten_parameters;
use hitroute_core::pso::{init_swarm, JunctionCandidate, JunctionContext, PsoConfig, SearchSpace};
use hitroute_core::{CandidateFeatures, Hierarchy};

fn features(i: usize) -> CandidateFeatures {
    let t = i as f64 / 4.0;
    CandidateFeatures {
        density: 0.02 * t,
        max_speed_norm: 0.3 + 0.2 * t,
        familiarity: 0.5,
        usual_speed: 15.0,
        departure_time: 8.0,
        weather: 0.2,
    }
}

fn inference(c: &mut Criterion) {
    let h = Hierarchy::default();
    let t1 = h.degenerate_to_t1();
    let f = features(1);
    c.bench_function("preference_it2", |b| {
        b.iter(|| h.evaluate_preference(black_box(&f)).unwrap())
    });
    c.bench_function("preference_t1", |b| {
        b.iter(|| t1.evaluate_preference(black_box(&f)).unwrap())
    });

    let y = Universe::unit().grid(201);
    let upper: Vec<f64> = y.iter().map(|&v| (1.0 - (v - 0.4).abs() * 2.0).max(0.0)).collect();
    let lower: Vec<f64> = upper.iter().map(|u| 0.6 * u).collect();
    c.bench_function("km_201", |b| {
        b.iter(|| km_reduce(black_box(&y), &lower, &upper).unwrap())
    });

    let layout = flatten_parameters(&h, &["PDE"]).unwrap();
    let candidates: Vec<_> = (0..3)
        .map(|edge| JunctionCandidate {
            edge,
            features: features(edge),
        })
        .collect();
    let ctx = JunctionContext::new(&h, &layout, candidates).unwrap();
    let space = SearchSpace::from_parameters(&layout).unwrap();
    c.bench_function("pso_iteration_3_candidates", |b| {
        let mut swarm = init_swarm(&PsoConfig::default(), space.clone()).unwrap();
        b.iter(|| swarm.iterate(&ctx))
    });
}

criterion_group!(benches, inference);
criterion_main!(benches);
