use super::*;

fn favourable() -> CandidateFeatures {
    CandidateFeatures {
        density: 0.0,
        max_speed_norm: 1.0,
        familiarity: 1.0,
        usual_speed: 40.0,
        departure_time: 2.0,
        weather: 0.0,
    }
}

fn lcg_features(n: usize) -> Vec<CandidateFeatures> {
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n)
        .map(|_| CandidateFeatures {
            density: next() * spec::DENSITY_MAX,
            max_speed_norm: next(),
            familiarity: next(),
            usual_speed: next() * 40.0,
            departure_time: next() * 24.0,
            weather: next(),
        })
        .collect()
}

#[test]
fn default_order_is_lexicographically_first_topological_order() {
    let h = Hierarchy::default();
    assert_eq!(h.evaluation_order(), vec!["Path", "Driver", "Environment", "PD", "PDE"]);

    // Oracle: enumerate all permutations and keep the smallest valid one.
    let edges = [(0, 3), (1, 3), (2, 4), (3, 4)];
    let mut best: Option<Vec<usize>> = None;
    let mut perm: Vec<usize> = (0..5).collect();
    permute(&mut perm, 0, &mut |p| {
        let pos = |u: usize| p.iter().position(|&x| x == u).unwrap();
        if edges.iter().all(|&(a, b)| pos(a) < pos(b)) && best.as_ref().is_none_or(|b| p < b.as_slice()) {
            best = Some(p.to_vec());
        }
    });
    assert_eq!(best.unwrap(), h.order);
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

#[test]
fn self_loop_is_a_cycle() {
    let mut spec = HierarchySpec::default();
    let pd = spec.units.iter_mut().find(|u| u.name == "PD").unwrap();
    pd.inputs[1].source = InputSource::Unit("PD".into());
    let err = Hierarchy::build(&spec).unwrap_err();
    assert!(err.to_string().contains("cycle"), "{err}");
}

#[test]
fn missing_leaf_is_rejected() {
    let mut spec = HierarchySpec::default();
    let env = spec.units.iter_mut().find(|u| u.name == "Environment").unwrap();
    env.inputs[1].source = InputSource::Feature(Feature::DepartureTime);
    let err = Hierarchy::build(&spec).unwrap_err();
    assert!(err.to_string().contains("Weather"), "{err}");
}

#[test]
fn dangling_unit_reference_is_rejected() {
    let mut spec = HierarchySpec::default();
    spec.units[3].inputs[0].source = InputSource::Unit("Nowhere".into());
    assert!(Hierarchy::build(&spec).unwrap_err().to_string().contains("Nowhere"));
}

#[test]
fn favourable_candidate_is_preferred() {
    let h = Hierarchy::default();
    let good = h.evaluate_preference(&favourable()).unwrap();
    assert!(good > 0.5, "{good}");
    let jam = CandidateFeatures {
        density: spec::DENSITY_MAX * 0.9,
        ..favourable()
    };
    let bad = h.evaluate_preference(&jam).unwrap();
    assert!(bad < good, "{bad} vs {good}");
    assert_eq!(good, h.evaluate_preference(&favourable()).unwrap());
}

#[test]
fn out_of_universe_feature_is_a_domain_error() {
    let h = Hierarchy::default();
    let f = CandidateFeatures {
        density: 5.0,
        ..favourable()
    };
    assert!(matches!(h.evaluate_preference(&f), Err(Error::Domain { .. })));
    let clamped = h.clamp_features(&f);
    assert_eq!(clamped.density, spec::DENSITY_MAX);
    assert!(h.evaluate_preference(&clamped).is_ok());
}

#[test]
fn any_topological_order_gives_the_same_output() {
    let h = Hierarchy::default();
    let alt = [2, 1, 0, 3, 4];
    for f in lcg_features(50) {
        let a = h.eval_in_order(&h.order, &f, false).unwrap()[h.root];
        let b = h.eval_in_order(&alt, &f, false).unwrap()[h.root];
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn intermediate_outputs_stay_in_unit_interval() {
    let h = Hierarchy::default();
    for f in lcg_features(200) {
        for v in h.eval_in_order(&h.order, &f, false).unwrap() {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn parameter_dimensions() {
    let h = Hierarchy::default();
    assert_eq!(flatten_parameters(&h, &["PDE"]).unwrap().len(), 54);
    let all = ["Path", "Driver", "Environment", "PD", "PDE"];
    assert_eq!(flatten_parameters(&h, &all).unwrap().len(), 270);
    assert!(flatten_parameters(&h, &["Nope"]).is_err());
}

#[test]
fn flatten_apply_round_trip() {
    let h = Hierarchy::default();
    let all = ["Path", "Driver", "Environment", "PD", "PDE"];
    let p = flatten_parameters(&h, &all).unwrap();
    let h2 = apply_parameters(&h, &p).unwrap();
    let p2 = flatten_parameters(&h2, &all).unwrap();
    assert!(p
        .values()
        .iter()
        .zip(p2.values())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
    for f in lcg_features(100) {
        assert_eq!(
            h.evaluate_preference(&f).unwrap().to_bits(),
            h2.evaluate_preference(&f).unwrap().to_bits()
        );
    }
}

#[test]
fn apply_rejects_out_of_bounds_and_unordered() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let mut v = p.values().to_vec();
    v[4] = 0.1;
    let err = apply_parameters(&h, &p.with_values(v).unwrap()).unwrap_err();
    assert!(err.to_string().contains("outside"), "{err}");

    let mut v = p.values().to_vec();
    // Medium of pd_pref: (0.25, 0.45, 0.55, 0.75) -> swap a and b.
    v.swap(6, 7);
    let err = apply_parameters(&h, &p.with_values(v).unwrap()).unwrap_err();
    assert!(err.to_string().contains("repair gives"), "{err}");
}

#[test]
fn apply_leaves_unscoped_units_alone() {
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let mut v = p.values().to_vec();
    v[4] = 0.6;
    let h2 = apply_parameters(&h, &p.with_values(v).unwrap()).unwrap();
    for name in ["Path", "Driver", "Environment", "PD"] {
        assert_eq!(h.unit(name), h2.unit(name));
    }
    assert_ne!(h.unit("PDE"), h2.unit("PDE"));
}

#[test]
fn widening_strong_support_sweep() {
    // Strong of the PDE output sits at offset (2 inputs * 3 sets + 2) * 6.
    let h = Hierarchy::default();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    let base = (2 * 3 + 2) * 6;
    assert_eq!(&p.values()[base..base + 4], &[0.55, 0.75, 1.0, 1.0]);
    let f = favourable();
    let mut prev = f64::INFINITY;
    for step in 0..=10 {
        let mut v = p.values().to_vec();
        v[base] = 0.55 - 0.05 * step as f64;
        let out = apply_parameters(&h, &p.with_values(v).unwrap())
            .unwrap()
            .evaluate_preference(&f)
            .unwrap();
        // Adding support on the low side can only pull the centroid down.
        assert!(out <= prev + 1e-12, "step {step}: {out} > {prev}");
        assert!(out > 0.5);
        prev = out;
    }
}

#[test]
fn degenerate_is_idempotent() {
    let h = Hierarchy::default();
    let once = h.degenerate_to_t1();
    assert!(once.is_type1());
    assert_eq!(once.degenerate_to_t1(), once);
    for f in lcg_features(20) {
        assert_eq!(
            once.evaluate_preference(&f).unwrap(),
            once.degenerate_to_t1().evaluate_preference(&f).unwrap()
        );
    }
}

#[test]
fn type1_bounds_are_pinned() {
    let h = Hierarchy::default().degenerate_to_t1();
    let p = flatten_parameters(&h, &["PDE"]).unwrap();
    for k in (0..p.len()).step_by(6) {
        assert_eq!((p.lower()[k + 4], p.upper()[k + 4]), (1.0, 1.0));
        assert_eq!((p.lower()[k + 5], p.upper()[k + 5]), (0.0, 0.0));
    }
}

#[test]
fn root_inputs_reproduce_full_evaluation() {
    let h = Hierarchy::default();
    for f in lcg_features(50) {
        let inputs = h.root_inputs(&f).unwrap();
        let via_root = Hierarchy::evaluate_root_with(h.root(), inputs).unwrap();
        assert_eq!(via_root.to_bits(), h.evaluate_preference(&f).unwrap().to_bits());
    }
}
