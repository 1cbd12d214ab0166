//! Generator for square grid scenarios with random trips and a demand burst
//! on the central block. The defaults describe the benchmark city: two fast
//! arterials crossing at the centre and a morning wave of departures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AreaRule, DemandEvent, DemandSpec, InlineNetwork, NetworkSource, ScenarioConfig, DEFAULT_HORIZON};
use crate::network::{DriverProfile, EdgeSpec, Node, RoadNetwork, RouteWeight};
use crate::pso::PsoConfig;
use crate::sim::SimConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct GridParams {
    /// Junctions per side.
    pub size: usize,
    /// m.
    pub edge_length: f64,
    /// Rows and columns (by junction index) whose roads run at `fast_speed`.
    pub fast_lines: Vec<usize>,
    /// m/s.
    pub fast_speed: f64,
    /// m/s on every other road.
    pub slow_speed: f64,
    pub vehicles: usize,
    /// Departures are uniform over `[0, depart_window]`.
    pub depart_window: u64,
    pub event_vehicles: usize,
    pub event_window: [u64; 2],
    pub event_rule: AreaRule,
    /// Vehicles per second crossing one junction.
    pub junction_rate: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            size: 8,
            edge_length: 200.0,
            fast_lines: vec![3, 4],
            fast_speed: 40.0,
            slow_speed: 20.0,
            vehicles: 500,
            depart_window: 150,
            event_vehicles: 100,
            event_window: [1000, 1500],
            event_rule: AreaRule::DestInArea,
            junction_rate: 0.5,
        }
    }
}

fn name(x: usize, y: usize) -> String {
    format!("{x}_{y}")
}

fn edge_id(a: (usize, usize), b: (usize, usize)) -> String {
    format!("e{}-{}", name(a.0, a.1), name(b.0, b.1))
}

pub fn grid_network(p: &GridParams) -> InlineNetwork {
    let n = p.size;
    let fast = |x: usize, y: usize, x2: usize, y2: usize| {
        (x == x2 && p.fast_lines.contains(&x)) || (y == y2 && p.fast_lines.contains(&y))
    };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            nodes.push(Node {
                id: name(x, y),
                x: x as f64 * p.edge_length,
                y: y as f64 * p.edge_length,
            });
            for (x2, y2) in [(x + 1, y), (x, y + 1)] {
                if x2 >= n || y2 >= n {
                    continue;
                }
                let speed = if fast(x, y, x2, y2) { p.fast_speed } else { p.slow_speed };
                for (a, b) in [((x, y), (x2, y2)), ((x2, y2), (x, y))] {
                    edges.push(EdgeSpec {
                        id: edge_id(a, b),
                        from: name(a.0, a.1),
                        to: name(b.0, b.1),
                        length: p.edge_length,
                        speed,
                        lanes: 1,
                    });
                }
            }
        }
    }
    InlineNetwork {
        nodes,
        edges,
        connections: None,
    }
}

/// The four edges circling the central block, counter-clockwise.
pub fn central_area(p: &GridParams) -> Vec<String> {
    let lo = (p.size - 1) / 2;
    let hi = lo + 1;
    vec![
        edge_id((lo, lo), (hi, lo)),
        edge_id((hi, lo), (hi, hi)),
        edge_id((hi, hi), (lo, hi)),
        edge_id((lo, hi), (lo, lo)),
    ]
}

/// Grid scenario whose random trips are drawn from `seed`. Every trip has
/// distinct, mutually reachable origin and destination edges.
pub fn grid_scenario(p: &GridParams, seed: u64) -> ScenarioConfig {
    let inline = grid_network(p);
    let net: RoadNetwork = inline.build().expect("grid networks are valid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut demands = Vec::with_capacity(p.vehicles);
    let width = p.vehicles.to_string().len();
    while demands.len() < p.vehicles {
        let o = rng.random_range(0..net.edge_count());
        let d = rng.random_range(0..net.edge_count());
        if o == d || net.cost_to(d, RouteWeight::Time)[o].is_infinite() {
            continue;
        }
        demands.push(DemandSpec {
            id: format!("v{:0width$}", demands.len()),
            origin: net.edge(o).id.clone(),
            dest: net.edge(d).id.clone(),
            depart: rng.random_range(0..=p.depart_window),
            profile: DriverProfile::default(),
        });
    }
    demands.sort_by_key(|d| d.depart);
    let demand_events = if p.event_vehicles > 0 {
        vec![DemandEvent {
            name: "event".into(),
            area: central_area(p),
            count: p.event_vehicles,
            window: p.event_window,
            rule: p.event_rule,
            profile: DriverProfile::default(),
        }]
    } else {
        Vec::new()
    };
    ScenarioConfig {
        network: NetworkSource::Inline(inline),
        demands,
        demand_events,
        hierarchy: None,
        pso: PsoConfig::default(),
        simulation: SimConfig {
            junction_rate: p.junction_rate,
            ..SimConfig::default()
        },
        horizon: DEFAULT_HORIZON,
    }
}
