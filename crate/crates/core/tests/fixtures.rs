use std::fs;
use std::path::Path;

use hitroute_core::experiment::{run_strategy, Strategy};
use hitroute_core::scenario::{import_sumo_net, import_sumo_routes};
use hitroute_core::{Error, ScenarioConfig};

fn fixture(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

#[test]
fn square_network_counts() {
    let net = import_sumo_net(&fixture("square.net.xml")).unwrap();
    assert_eq!(net.ignored, 4);
    let n = net.value;
    assert_eq!(
        (n.node_count(), n.edge_count(), n.lane_count(), n.connection_count()),
        (4, 4, 5, 4)
    );
    let bc = n.edge_index("bc").unwrap();
    assert_eq!(n.edge(bc).lanes, 2);
    assert!(n.edge_index(":b_0").is_none());
}

#[test]
fn square_routes() {
    let r = import_sumo_routes(&fixture("square.rou.xml")).unwrap();
    assert_eq!(r.ignored, 1);
    let got: Vec<_> = r
        .value
        .iter()
        .map(|d| (d.id.as_str(), d.origin.as_str(), d.dest.as_str(), d.depart))
        .collect();
    assert_eq!(
        got,
        [("t1", "ab", "cd", 0), ("v1", "bc", "da", 5), ("v2", "bc", "cd", 10)]
    );
}

#[test]
fn scenario_loads_sumo_network_relative_to_its_file() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("fixtures");
    fs::create_dir(&sub).unwrap();
    fs::write(sub.join("square.net.xml"), fixture("square.net.xml")).unwrap();
    let path = dir.path().join("scenario.json");
    fs::write(
        &path,
        r#"{"network": {"sumo_file": "fixtures/square.net.xml"},
            "demands": [{"id": "a", "origin": "ab", "dest": "da", "depart": 0}]}"#,
    )
    .unwrap();
    let sc = ScenarioConfig::load(&path).unwrap();
    assert_eq!(sc.network.edge_count(), 4);
    let out = run_strategy(&sc, Strategy::Hit2, 1, 600).unwrap();
    assert_eq!(out.arrived(), 1);
    assert_eq!(out.routes[0], ["ab", "bc", "cd", "da"]);
}

#[test]
fn missing_sumo_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    fs::write(&path, r#"{"network": {"sumo_file": "nope.net.xml"}}"#).unwrap();
    assert!(matches!(ScenarioConfig::load(&path), Err(Error::Io(_))));
}
