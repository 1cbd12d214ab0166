use std::path::Path;

use super::*;
use crate::sim::{Router, Simulation, StepStats, TripRecord};

const MINIMAL: &str = r#"{
  "network": {"inline": {
    "nodes": [{"id": "A", "x": 0, "y": 0}, {"id": "B", "x": 100, "y": 0}],
    "edges": [{"id": "e", "from": "A", "to": "B", "length": 100, "speed": 20}]
  }},
  "demands": [{"id": "v1", "origin": "e", "dest": "e", "depart": 0}]
}"#;

#[test]
fn minimal_scenario_is_valid() {
    let cfg = parse_native(MINIMAL).unwrap();
    assert_eq!(cfg.horizon, 3600);
    let sc = cfg.resolve(Path::new(".")).unwrap();
    assert_eq!(sc.network.edge_count(), 1);
    let d = sc.demands(1);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].id, "v1");
}

#[test]
fn unknown_edge_is_named() {
    let text = MINIMAL.replace(r#""dest": "e""#, r#""dest": "nowhere""#);
    let err = parse_native(&text).unwrap().resolve(Path::new(".")).unwrap_err();
    assert!(matches!(err, Error::Scenario(_)));
    assert!(err.to_string().contains("nowhere"), "{err}");
}

#[test]
fn syntax_error_reports_position() {
    let err = parse_native("{\n  \"network\": ,\n}").unwrap_err();
    match err {
        Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 14)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_native("{\"network\": "), Err(Error::Syntax { .. })));
    assert!(matches!(
        parse_native(r#"{"network": {"ferry": 1}}"#),
        Err(Error::Scenario(_))
    ));
    assert!(matches!(
        parse_native(&MINIMAL.replace("\"demands\"", "\"demandz\"")),
        Err(Error::Scenario(_))
    ));
}

#[test]
fn native_round_trip() {
    let cfg = parse_native(MINIMAL).unwrap();
    let text = serialize_native(&cfg);
    assert_eq!(parse_native(&text).unwrap(), cfg);
    assert_eq!(serialize_native(&parse_native(&text).unwrap()), text);
    let grid = grid::grid_scenario(&grid::GridParams::default(), 4);
    assert_eq!(parse_native(&serialize_native(&grid)).unwrap(), grid);
}

#[test]
fn event_trips_follow_the_rule() {
    let mut p = grid::GridParams {
        size: 4,
        vehicles: 10,
        ..Default::default()
    };
    for rule in [AreaRule::OriginInArea, AreaRule::DestInArea, AreaRule::Both] {
        p.event_rule = rule;
        let sc = grid::grid_scenario(&p, 2).resolve(Path::new(".")).unwrap();
        let area: Vec<usize> = grid::central_area(&p)
            .iter()
            .map(|a| sc.network.edge_index(a).unwrap())
            .collect();
        let d = sc.demands(7);
        assert_eq!(d, sc.demands(7));
        let events = &d[10..];
        assert_eq!(events.len(), 100);
        for e in events {
            assert!((1000..=1500).contains(&e.depart));
            assert_ne!(e.origin, e.dest);
            let (o, t) = (area.contains(&e.origin), area.contains(&e.dest));
            match rule {
                AreaRule::OriginInArea => assert!(o),
                AreaRule::DestInArea => assert!(t),
                AreaRule::Both => assert!(o && t),
            }
        }
    }
}

#[test]
fn grid_has_expected_shape() {
    let p = grid::GridParams::default();
    let net = grid::grid_network(&p).build().unwrap();
    assert_eq!(net.node_count(), 64);
    assert_eq!(net.edge_count(), 2 * 2 * 8 * 7);
    let fast = net.edges().iter().filter(|e| e.speed == 40.0).count();
    assert_eq!(fast, 2 * 4 * 7);
    for a in grid::central_area(&p) {
        // The central block is ringed by the arterials.
        assert_eq!(net.edge(net.edge_index(&a).unwrap()).speed, 40.0);
    }
}

const NET: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<net version="1.9">
  <location netOffset="0,0"/>
  <junction id="a" type="priority" x="0" y="0"/>
  <junction id="b" type="priority" x="100" y="0"/>
  <junction id=":b_0" type="internal" x="100" y="0"/>
  <edge id=":b_0" function="internal"><lane id=":b_0_0" length="3" speed="5"/></edge>
  <edge id="ab" from="a" to="b">
    <lane id="ab_0" index="0" length="100" speed="13.89"/>
    <lane id="ab_1" index="1" length="101" speed="10"/>
  </edge>
  <edge id="ba" from="b" to="a"><lane id="ba_0" length="100" speed="13.89"/></edge>
  <connection from="ab" to="ba" fromLane="0" toLane="0"/>
  <connection from="ab" to="ba" fromLane="1" toLane="0"/>
  <connection from=":b_0" to="ba"/>
</net>"#;

#[test]
fn sumo_net_subset() {
    let imp = import_sumo_net(NET).unwrap();
    let net = imp.value;
    assert_eq!((net.node_count(), net.edge_count(), net.connection_count()), (2, 2, 1));
    let ab = net.edge(net.edge_index("ab").unwrap());
    assert_eq!((ab.lanes, ab.length, ab.speed), (2, 100.0, 13.89));
    assert_eq!(imp.ignored, 4);
}

#[test]
fn sumo_net_errors() {
    let missing = NET.replace(r#"<edge id="ba" from="b""#, r#"<edge id="ba""#);
    match import_sumo_net(&missing).unwrap_err() {
        Error::Xml { path, message } => {
            assert_eq!(path, "/net/edge[@id='ba']");
            assert!(message.contains("from"));
        }
        other => panic!("{other:?}"),
    }
    let dangling = NET.replace(r#"to="ba" fromLane="0""#, r#"to="zz" fromLane="0""#);
    let err = import_sumo_net(&dangling).unwrap_err();
    assert!(
        matches!(err, Error::Network(_)) && err.to_string().contains("zz"),
        "{err}"
    );
    let bad_node = NET.replace(r#"from="b" to="a""#, r#"from="b" to="q""#);
    assert!(import_sumo_net(&bad_node).unwrap_err().to_string().contains('q'));
    assert!(matches!(import_sumo_net("<net><junction"), Err(Error::Syntax { .. })));
    assert!(matches!(import_sumo_net("<routes/>"), Err(Error::Xml { .. })));
}

#[test]
fn sumo_routes_subset() {
    let text = r#"<routes>
      <vType id="car"/>
      <route id="r" edges="e2 e4"/>
      <trip id="t" depart="30" from="e1" to="e5"/>
      <vehicle id="v" depart="2.6"><route edges="e1 e2 e3"/></vehicle>
      <vehicle id="w" depart="0" route="r"/>
    </routes>"#;
    let imp = import_sumo_routes(text).unwrap();
    let got: Vec<(&str, &str, &str, u64)> = imp
        .value
        .iter()
        .map(|d| (d.id.as_str(), d.origin.as_str(), d.dest.as_str(), d.depart))
        .collect();
    assert_eq!(got, [("t", "e1", "e5", 30), ("v", "e1", "e3", 3), ("w", "e2", "e4", 0)]);
    assert_eq!(imp.ignored, 1);
    let dup = text.replace(r#"id="w""#, r#"id="t""#);
    assert!(import_sumo_routes(&dup).unwrap_err().to_string().contains("duplicate"));
    let missing = text.replace(r#"depart="30" "#, "");
    assert!(matches!(import_sumo_routes(&missing), Err(Error::Xml { .. })));
}

fn record(id: &str, arrival: Option<u64>) -> TripRecord {
    TripRecord {
        vehicle_id: id.into(),
        depart: 0,
        arrival,
        duration: arrival,
        waiting_steps: 3,
        route_length: 240.0,
        edges_count: 2,
    }
}

#[test]
fn tripinfo_rows() {
    assert_eq!(write_tripinfo(&[]), format!("{TRIPINFO_HEADER}\n"));
    let one = write_tripinfo(&[record("v1", Some(12))]);
    assert_eq!(one, format!("{TRIPINFO_HEADER}\nv1,0,12,12,3,240,2\n"));
    let recs = vec![record("b", None), record("a", Some(7))];
    let text = write_tripinfo(&recs);
    assert!(text.ends_with("b,0,,,3,240,2\n"));
    let back = parse_tripinfo(&text).unwrap();
    assert_eq!(back, vec![recs[1].clone(), recs[0].clone()]);
}

#[test]
fn metrics_rows() {
    let sc = parse_native(MINIMAL).unwrap().resolve(Path::new(".")).unwrap();
    let out = Simulation::new(&sc.network, sc.demands(1), SimConfig::default(), Router::Shortest)
        .unwrap()
        .run(8)
        .unwrap();
    let text = write_metrics(&out.series, out.mean_average_travel_time());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 8 + 1);
    assert_eq!(lines[0], METRICS_HEADER);
    assert_eq!(lines[5], "5,0,1,5");
    assert_eq!(lines[9], "summary,,,5");
    let short: Vec<StepStats> = out.series[..3].to_vec();
    assert_eq!(write_metrics(&short, None).lines().count(), 5);
    assert!(write_metrics(&short, None).ends_with("summary,,,\n"));
}
