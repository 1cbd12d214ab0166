//! Running a scenario under each routing strategy.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::dijkstra_route;
use crate::pso::PsoConfig;
use crate::scenario::Scenario;
use crate::sim::{Router, RunOutput, Simulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Dijkstra,
    Hit1,
    Hit1Pso,
    Hit2,
    Hit2Pso,
}

impl Strategy {
    /// Canonical order of comparison tables.
    pub const ALL: [Strategy; 5] = [
        Strategy::Dijkstra,
        Strategy::Hit1,
        Strategy::Hit1Pso,
        Strategy::Hit2,
        Strategy::Hit2Pso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dijkstra => "dijkstra",
            Strategy::Hit1 => "hit1",
            Strategy::Hit1Pso => "hit1-pso",
            Strategy::Hit2 => "hit2",
            Strategy::Hit2Pso => "hit2-pso",
        }
    }

    pub fn is_tuned(self) -> bool {
        matches!(self, Strategy::Hit1Pso | Strategy::Hit2Pso)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Scenario(format!("unknown strategy `{s}`")))
    }
}

/// Swarm configuration for a run: the scenario's settings with the run seed
/// folded into the swarm seed.
pub fn run_pso_config(base: &PsoConfig, seed: u64) -> PsoConfig {
    PsoConfig {
        seed: base.seed ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ..base.clone()
    }
}

pub fn router_for(scenario: &Scenario, strategy: Strategy, seed: u64) -> Result<Router> {
    let h = match strategy {
        Strategy::Dijkstra => return Ok(Router::Shortest),
        Strategy::Hit1 | Strategy::Hit1Pso => scenario.hierarchy.degenerate_to_t1(),
        Strategy::Hit2 | Strategy::Hit2Pso => scenario.hierarchy.clone(),
    };
    if strategy.is_tuned() {
        Router::tuned(h, &run_pso_config(&scenario.config.pso, seed))
    } else {
        Ok(Router::Fuzzy(h))
    }
}

/// Simulates the scenario's demand drawn with `seed` for `horizon` steps.
pub fn run_strategy(scenario: &Scenario, strategy: Strategy, seed: u64, horizon: u64) -> Result<RunOutput> {
    let router = router_for(scenario, strategy, seed)?;
    let sim = Simulation::new(
        &scenario.network,
        scenario.demands(seed),
        scenario.config.simulation.clone(),
        router,
    )?;
    sim.run(horizon)
}

/// Share of arrived vehicles whose driven route differs from the free-flow
/// shortest route between their endpoints; `None` when nothing arrived.
pub fn altered_route_fraction(scenario: &Scenario, out: &RunOutput) -> Option<f64> {
    let net = &scenario.network;
    let w = scenario.config.simulation.route_weight;
    let (mut arrived, mut altered) = (0usize, 0usize);
    for (rec, route) in out.records.iter().zip(&out.routes) {
        if rec.arrival.is_none() {
            continue;
        }
        arrived += 1;
        let ids: Option<Vec<usize>> = route.iter().map(|e| net.edge_index(e)).collect();
        let ids = ids.expect("routes name network edges");
        let planned = dijkstra_route(net, ids[0], *ids.last().expect("arrived routes are non-empty"), w);
        if planned.is_none_or(|p| p.edges != ids) {
            altered += 1;
        }
    }
    (arrived > 0).then(|| altered as f64 / arrived as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub strategy: Strategy,
    pub mean_avg_travel_time: Option<f64>,
    pub arrived: usize,
    pub unfinished: usize,
    pub altered_route_fraction: Option<f64>,
}

pub fn comparison_row(scenario: &Scenario, strategy: Strategy, out: &RunOutput) -> ComparisonRow {
    ComparisonRow {
        strategy,
        mean_avg_travel_time: out.mean_average_travel_time(),
        arrived: out.arrived(),
        unfinished: out.unfinished(),
        altered_route_fraction: altered_route_fraction(scenario, out),
    }
}

/// Runs every strategy on the same demand, one thread each, and returns the
/// outputs in canonical order.
pub fn run_all(scenario: &Scenario, seed: u64, horizon: u64) -> Result<Vec<(Strategy, RunOutput)>> {
    let results: Vec<Result<RunOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = Strategy::ALL
            .into_iter()
            .map(|st| s.spawn(move || run_strategy(scenario, st, seed, horizon)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("strategy run panicked"))
            .collect()
    });
    Strategy::ALL
        .into_iter()
        .zip(results)
        .map(|(st, r)| r.map(|o| (st, o)))
        .collect()
}

pub fn compare_strategies(scenario: &Scenario, seed: u64, horizon: u64) -> Result<Vec<ComparisonRow>> {
    Ok(run_all(scenario, seed, horizon)?
        .iter()
        .map(|(st, out)| comparison_row(scenario, *st, out))
        .collect())
}

pub const COMPARISON_HEADER: &str = "strategy,mean_avg_travel_time,arrived,unfinished,altered_route_fraction";

/// One row per strategy; undefined values are left empty.
pub fn write_comparison(rows: &[ComparisonRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    w.write_record(COMPARISON_HEADER.split(',')).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.strategy.to_string(),
            opt(r.mean_avg_travel_time),
            r.arrived.to_string(),
            r.unfinished.to_string(),
            opt(r.altered_route_fraction),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}
