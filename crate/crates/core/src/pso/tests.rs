use super::*;
use crate::hierarchy::{flatten_parameters, CandidateFeatures, Hierarchy};

fn cfg(seed: u64) -> PsoConfig {
    PsoConfig {
        seed,
        ..PsoConfig::default()
    }
}

fn features(density: f64, max_speed_norm: f64) -> CandidateFeatures {
    CandidateFeatures {
        density,
        max_speed_norm,
        familiarity: 0.5,
        usual_speed: 20.0,
        departure_time: 8.0,
        weather: 0.2,
    }
}

fn candidates(spec: &[(usize, f64, f64)]) -> Vec<JunctionCandidate> {
    spec.iter()
        .map(|&(edge, d, s)| JunctionCandidate {
            edge,
            features: features(d, s),
        })
        .collect()
}

#[test]
fn config_validation() {
    assert!(PsoConfig::default().validate().is_ok());
    for bad in [
        PsoConfig {
            swarm_size: 1,
            ..PsoConfig::default()
        },
        PsoConfig {
            w: 0.0,
            ..PsoConfig::default()
        },
        PsoConfig {
            c1: -1.0,
            ..PsoConfig::default()
        },
        PsoConfig {
            vmax_fraction: 1.5,
            ..PsoConfig::default()
        },
        PsoConfig {
            iterations_per_call: 0,
            ..PsoConfig::default()
        },
    ] {
        assert!(bad.validate().is_err());
    }
}

#[test]
fn zero_dimension_space_is_rejected() {
    assert!(SearchSpace::new(vec![], vec![]).is_err());
    assert!(SearchSpace::new(vec![1.0], vec![0.0]).is_err());
}

#[test]
fn init_is_deterministic_and_sized() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let a = init_swarm(&cfg(7), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    let b = init_swarm(&cfg(7), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    assert_eq!(a.particles(), b.particles());
    assert_eq!(a.particles().len(), 30);
    assert!(a.particles().iter().all(|q| q.position.len() == 54));
    let c = init_swarm(&cfg(8), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    assert_ne!(a.particles(), c.particles());
    for q in a.particles() {
        for k in 0..54 {
            assert!(q.position[k] >= p.lower()[k] && q.position[k] <= p.upper()[k]);
            assert!(q.velocity[k].abs() <= a.vmax()[k]);
        }
    }
}

#[test]
fn degenerate_box_gives_still_identical_particles() {
    let space = SearchSpace::new(vec![0.3; 5], vec![0.3; 5]).unwrap();
    let s = init_swarm(&cfg(3), space).unwrap();
    for q in s.particles() {
        assert!(q.position.iter().all(|&x| x == 0.3));
        assert!(q.velocity.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn velocity_hand_example() {
    let c = PsoConfig::default();
    let v = velocity_update(&[0.1], &[0.5], &[0.6], &[0.7], &c, &[0.5], &[0.5], &[1.0]);
    assert!((v[0] - 0.399).abs() < 1e-12, "{}", v[0]);
    let v = velocity_update(&[0.1], &[0.5], &[0.6], &[0.7], &c, &[0.5], &[0.5], &[0.3]);
    assert_eq!(v[0], 0.3);
    let v = velocity_update(&[0.0], &[0.4], &[0.4], &[0.4], &c, &[0.9], &[0.1], &[0.3]);
    assert_eq!(v[0], 0.0);
}

#[test]
fn position_examples() {
    let space = SearchSpace::new(vec![0.0], vec![1.0]).unwrap();
    assert!((update_position(&[0.5], &[0.3], &space)[0] - 0.8).abs() < 1e-15);
    assert_eq!(update_position(&[0.9], &[0.3], &space)[0], 1.0);

    let space = SearchSpace::new(vec![0.0; 4], vec![1.0; 4])
        .unwrap()
        .with_sorted_quads(vec![0])
        .unwrap();
    assert_eq!(
        update_position(&[0.4, 0.2, 0.5, 0.6], &[0.0; 4], &space),
        vec![0.2, 0.4, 0.5, 0.6]
    );
}

#[test]
fn fitness_examples() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let ctx = JunctionContext::new(&h, &p, candidates(&[(0, 0.02, 1.0), (1, 0.03, 1.0), (2, 0.05, 1.0)])).unwrap();
    assert_eq!(ctx.select(p.values()).unwrap(), 0);
    assert!((ctx.fitness(p.values()) - 0.2).abs() < 1e-9);

    let one = JunctionContext::new(&h, &p, candidates(&[(4, 0.07, 0.5)])).unwrap();
    assert_eq!(one.fitness(p.values()), 1.0);

    let empty = JunctionContext::new(&h, &p, candidates(&[(0, 0.0, 1.0), (1, 0.0, 0.5), (2, 0.0, 0.2)])).unwrap();
    assert!((empty.fitness(p.values()) - 1.0 / 3.0).abs() < 1e-15);

    assert!(JunctionContext::new(&h, &p, vec![]).is_err());
    assert!(JunctionContext::new(&h, &p, candidates(&[(0, -0.1, 1.0)])).is_err());
}

#[test]
fn fast_path_matches_full_evaluation() {
    let h = Hierarchy::default();
    let pde = flatten_parameters(&h, &["PDE"]).unwrap();
    let cands = candidates(&[(0, 0.01, 0.3), (1, 0.04, 1.0), (2, 0.0, 0.6)]);
    let ctx = JunctionContext::new(&h, &pde, cands.clone()).unwrap();
    let mut s = init_swarm(&cfg(2), SearchSpace::from_parameters(&pde).unwrap()).unwrap();
    s.iterate(&ctx);
    for q in s.particles() {
        let fast = ctx.preferences(&q.position).unwrap();
        let h2 = crate::hierarchy::apply_parameters(&h, &pde.with_values(q.position.clone()).unwrap()).unwrap();
        let raw: Vec<_> = cands.iter().map(|c| c.features).collect();
        let slow: Vec<f64> = junction_features(&raw)
            .iter()
            .map(|f| h2.evaluate_preference(&h2.clamp_features(f)).unwrap())
            .collect();
        assert_eq!(fast, slow);
    }
}

#[test]
fn gbest_never_increases() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let ctx = JunctionContext::new(&h, &p, candidates(&[(0, 0.05, 1.0), (1, 0.02, 0.2), (2, 0.03, 0.6)])).unwrap();
    let mut s = init_swarm(&cfg(5), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    let mut last = f64::INFINITY;
    for _ in 0..3 {
        let out = s.tune_step(&ctx);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.best_fitness <= last);
        last = out.best_fitness;
        assert_eq!(out.best, s.gbest_position());
    }
}

#[test]
fn tuning_is_deterministic() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let ctx = JunctionContext::new(&h, &p, candidates(&[(0, 0.05, 1.0), (1, 0.02, 0.2)])).unwrap();
    let run = || {
        let mut s = init_swarm(&cfg(11), SearchSpace::from_parameters(&p).unwrap()).unwrap();
        s.seed_position(p.values()).unwrap();
        (s.tune_step(&ctx), s.particles().to_vec())
    };
    assert_eq!(run(), run());
}

#[test]
fn finds_the_empty_candidate() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    // The empty edge has the lowest speed limit, so the untuned controller
    // has to be bent to pick it.
    let ctx = JunctionContext::new(&h, &p, candidates(&[(0, 0.03, 1.0), (1, 0.0, 0.1), (2, 0.02, 0.9)])).unwrap();
    let mut hits = 0;
    for seed in 1..=10 {
        let mut s = init_swarm(&cfg(seed), SearchSpace::from_parameters(&p).unwrap()).unwrap();
        let out = s.tune_step(&ctx);
        if out.best_fitness == 0.0 && ctx.select(&out.best).unwrap() == 1 {
            hits += 1;
        }
    }
    assert!(hits >= 8, "{hits}/10");
}

#[test]
fn lower_bound_stops_early() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let ctx = JunctionContext::new(&h, &p, candidates(&[(0, 0.0, 1.0), (1, 0.05, 1.0)])).unwrap();
    let mut s = init_swarm(&cfg(1), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    s.seed_position(p.values()).unwrap();
    let out = s.tune_step(&ctx);
    assert_eq!(out.best_fitness, 0.0);
    assert_eq!(out.iterations, 0);
}

#[test]
fn scaling_densities_changes_nothing() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let base = candidates(&[(0, 0.013, 1.0), (1, 0.021, 0.2), (2, 0.007, 0.6), (3, 0.05, 0.5)]);
    let ctx = JunctionContext::new(&h, &p, base.clone()).unwrap();
    let mut s = init_swarm(&cfg(4), SearchSpace::from_parameters(&p).unwrap()).unwrap();
    s.iterate(&ctx);
    for k in [0.5, 2.0, 10.0] {
        let scaled: Vec<_> = base
            .iter()
            .map(|c| JunctionCandidate {
                edge: c.edge,
                features: CandidateFeatures {
                    density: c.features.density * k,
                    ..c.features
                },
            })
            .collect();
        let ctx2 = JunctionContext::new(&h, &p, scaled).unwrap();
        for q in s.particles() {
            assert_eq!(ctx.fitness(&q.position).to_bits(), ctx2.fitness(&q.position).to_bits());
            assert_eq!(ctx.select(&q.position).unwrap(), ctx2.select(&q.position).unwrap());
        }
    }
}

#[test]
fn sphere_converges() {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let space = SearchSpace::new(vec![-5.0; 10], vec![5.0; 10]).unwrap();
    let mut s = init_swarm(&cfg(1), space).unwrap();
    let mut last = f64::INFINITY;
    for _ in 0..200 {
        let f = s.iterate(&sphere);
        assert!(f <= last);
        last = f;
    }
    assert!(last.is_finite());
}
