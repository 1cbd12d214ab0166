//! Deterministic mesoscopic simulator with one-second steps.
//!
//! Each edge holds a FIFO queue of vehicles moving at a common speed that
//! depends on how many other vehicles share the edge. Vehicles that reach the end of an edge pick their next
//! edge once, then wait until the target has room and the edge's outflow
//! allowance permits a transfer.

mod metrics;

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{flatten_parameters, Hierarchy, ParameterVector};
use crate::network::{
    candidate_features, choose_by_preference, dijkstra_route, junction_preferences, Candidate, DriverProfile,
    EdgeState, EnvContext, RoadNetwork, RouteWeight, VEHICLE_SPACING,
};
use crate::pso::{JunctionCandidate, JunctionContext, PsoConfig, SearchSpace, Swarm};

pub use metrics::{mean_average_travel_time, running_averages};

/// Movement below this many metres in a step counts as waiting.
pub const WAITING_THRESHOLD: f64 = 0.1;
/// Speed never drops below this fraction of the limit.
pub const SPEED_FLOOR: f64 = 0.1;

/// Greenshields speed with a floor at a tenth of the limit.
pub fn edge_speed(limit: f64, density: f64, jam_density: f64) -> f64 {
    limit * (1.0 - density / jam_density).max(SPEED_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherPoint {
    /// Simulation second from which `severity` applies.
    pub at: u64,
    pub severity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Jam density of a single lane, veh/m.
    pub jam_density: f64,
    /// Vehicles per second per lane that may leave an edge.
    pub outflow_rate: f64,
    /// Vehicles per second that may cross a junction, over all its approaches.
    pub junction_rate: f64,
    /// Hour of day at second 0.
    pub start_hour: f64,
    /// Step function of weather severity; 0 before the first point.
    pub weather: Vec<WeatherPoint>,
    /// Cost used for shortest routes and remaining-cost tie-breaks.
    pub route_weight: RouteWeight,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            jam_density: 1.0 / VEHICLE_SPACING,
            outflow_rate: 0.5,
            junction_rate: 1.0,
            start_hour: 8.0,
            weather: Vec::new(),
            route_weight: RouteWeight::Time,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.jam_density > 0.0 && self.jam_density.is_finite()) {
            return Err(Error::Scenario("jam_density must be positive".into()));
        }
        if !(self.outflow_rate > 0.0 && self.outflow_rate.is_finite()) {
            return Err(Error::Scenario("outflow_rate must be positive".into()));
        }
        if !(self.junction_rate > 0.0 && self.junction_rate.is_finite()) {
            return Err(Error::Scenario("junction_rate must be positive".into()));
        }
        if !(0.0..24.0).contains(&self.start_hour) {
            return Err(Error::Scenario("start_hour must be in [0, 24)".into()));
        }
        if let Some(w) = self.weather.iter().find(|w| !(0.0..=1.0).contains(&w.severity)) {
            return Err(Error::Scenario(format!(
                "weather severity {} outside [0, 1]",
                w.severity
            )));
        }
        Ok(())
    }

    pub fn weather_at(&self, clock: u64) -> f64 {
        self.weather
            .iter()
            .filter(|w| w.at <= clock)
            .max_by_key(|w| w.at)
            .map_or(0.0, |w| w.severity)
    }
}

/// One vehicle to be released into the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: String,
    pub origin: usize,
    pub dest: usize,
    pub depart: u64,
    pub profile: DriverProfile,
}

/// How vehicles choose their next edge.
#[derive(Debug, Clone)]
pub enum Router {
    /// Follow the free-flow shortest route fixed at departure.
    Shortest,
    /// Pick the candidate the controller prefers.
    Fuzzy(Hierarchy),
    /// Tune the root unit with a persistent swarm before each choice.
    Tuned {
        hierarchy: Hierarchy,
        layout: ParameterVector,
        swarm: Box<Swarm>,
    },
}

impl Router {
    /// Swarm over the root unit's parameters, with one particle placed on
    /// the untuned controller.
    pub fn tuned(hierarchy: Hierarchy, cfg: &PsoConfig) -> Result<Self> {
        let root = hierarchy.root().name().to_string();
        let layout = flatten_parameters(&hierarchy, &[root.as_str()])?;
        let mut swarm = Swarm::new(cfg, SearchSpace::from_parameters(&layout)?)?;
        swarm.seed_position(layout.values())?;
        Ok(Router::Tuned {
            hierarchy,
            layout,
            swarm: Box::new(swarm),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub vehicle_id: String,
    /// Second the vehicle entered the network (scheduled second if it never did).
    pub depart: u64,
    pub arrival: Option<u64>,
    pub duration: Option<u64>,
    pub waiting_steps: u64,
    /// m.
    pub route_length: f64,
    pub edges_count: usize,
}

/// Counters after one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub step: u64,
    pub departed: usize,
    pub in_network: usize,
    pub arrived: usize,
    pub stranded: usize,
    /// Mean duration of the trips completed so far.
    pub avg_travel_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Sorted by vehicle id.
    pub records: Vec<TripRecord>,
    /// Edge ids driven by each vehicle, aligned with `records`.
    pub routes: Vec<Vec<String>>,
    /// Entry `i` describes the state after step `i + 1`.
    pub series: Vec<StepStats>,
    /// Vehicle ids that could not reach their destination, with the reason.
    pub stranded: Vec<(String, String)>,
    pub horizon: u64,
}

impl RunOutput {
    pub fn arrived(&self) -> usize {
        self.records.iter().filter(|r| r.arrival.is_some()).count()
    }

    pub fn unfinished(&self) -> usize {
        self.records.len() - self.arrived()
    }

    pub fn mean_average_travel_time(&self) -> Option<f64> {
        mean_average_travel_time(&self.records, self.horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pending,
    Driving,
    Arrived,
    Stranded,
}

#[derive(Debug, Clone)]
struct Vehicle {
    demand: Demand,
    status: Status,
    depart: u64,
    arrival: Option<u64>,
    edge: usize,
    offset: f64,
    route: Vec<usize>,
    waiting_steps: u64,
    next: Option<usize>,
    planned: Vec<usize>,
    remaining: Rc<Vec<f64>>,
    /// Free-flow distance from the end of each edge to the destination.
    distance: Rc<Vec<f64>>,
}

pub struct Simulation<'n> {
    net: &'n RoadNetwork,
    cfg: SimConfig,
    router: Router,
    vehicles: Vec<Vehicle>,
    /// Vehicles not yet inserted, by departure second then demand order.
    pending: VecDeque<usize>,
    queues: Vec<VecDeque<usize>>,
    counts: Vec<u32>,
    capacity: Vec<u32>,
    credit: Vec<f64>,
    /// Incoming edges of each junction.
    incoming: Vec<Vec<usize>>,
    junction_credit: Vec<f64>,
    remaining_cache: HashMap<usize, Rc<Vec<f64>>>,
    distance_cache: HashMap<usize, Rc<Vec<f64>>>,
    clock: u64,
    departed: usize,
    arrived: usize,
    stranded: Vec<(String, String)>,
    durations_sum: u64,
    series: Vec<StepStats>,
}

impl<'n> Simulation<'n> {
    pub fn new(net: &'n RoadNetwork, demands: Vec<Demand>, cfg: SimConfig, router: Router) -> Result<Self> {
        cfg.validate()?;
        let mut ids = std::collections::HashSet::new();
        for d in &demands {
            if d.origin >= net.edge_count() || d.dest >= net.edge_count() {
                return Err(Error::Scenario(format!("demand `{}` references a missing edge", d.id)));
            }
            if !ids.insert(d.id.as_str()) {
                return Err(Error::Scenario(format!("duplicate vehicle id `{}`", d.id)));
            }
        }
        let mut order: Vec<usize> = (0..demands.len()).collect();
        order.sort_by_key(|&i| (demands[i].depart, i));
        let empty = Rc::new(Vec::new());
        let vehicles = demands
            .into_iter()
            .map(|d| Vehicle {
                status: Status::Pending,
                depart: d.depart,
                arrival: None,
                edge: d.origin,
                offset: 0.0,
                route: Vec::new(),
                waiting_steps: 0,
                next: None,
                planned: Vec::new(),
                remaining: empty.clone(),
                distance: empty.clone(),
                demand: d,
            })
            .collect();
        let n = net.edge_count();
        let mut incoming = vec![Vec::new(); net.node_count()];
        for e in 0..n {
            incoming[net.edge(e).to].push(e);
        }
        Ok(Simulation {
            junction_credit: vec![0.0; incoming.len()],
            incoming,
            net,
            capacity: (0..n).map(|e| net.capacity(e)).collect(),
            credit: vec![0.0; n],
            cfg,
            router,
            vehicles,
            pending: order.into(),
            queues: vec![VecDeque::new(); n],
            counts: vec![0; n],
            remaining_cache: HashMap::new(),
            distance_cache: HashMap::new(),
            clock: 0,
            departed: 0,
            arrived: 0,
            stranded: Vec::new(),
            durations_sum: 0,
            series: Vec::new(),
        })
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Per-edge vehicle counts.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn series(&self) -> &[StepStats] {
        &self.series
    }

    pub fn departed(&self) -> usize {
        self.departed
    }

    pub fn arrived(&self) -> usize {
        self.arrived
    }

    pub fn stranded(&self) -> usize {
        self.stranded.len()
    }

    pub fn in_network(&self) -> usize {
        self.vehicles.iter().filter(|v| v.status == Status::Driving).count()
    }

    /// Current edge and offset of every driving vehicle, by vehicle id.
    pub fn positions(&self) -> Vec<(&str, usize, f64)> {
        self.vehicles
            .iter()
            .filter(|v| v.status == Status::Driving)
            .map(|v| (v.demand.id.as_str(), v.edge, v.offset))
            .collect()
    }

    pub fn waiting_steps(&self, id: &str) -> Option<u64> {
        self.vehicles
            .iter()
            .find(|v| v.demand.id == id)
            .map(|v| v.waiting_steps)
    }

    fn remaining_to(&mut self, dest: usize) -> Rc<Vec<f64>> {
        let (net, w) = (self.net, self.cfg.route_weight);
        self.remaining_cache
            .entry(dest)
            .or_insert_with(|| Rc::new(net.cost_to(dest, w)))
            .clone()
    }

    fn distance_to(&mut self, dest: usize) -> Rc<Vec<f64>> {
        if self.cfg.route_weight == RouteWeight::Length {
            return self.remaining_to(dest);
        }
        let net = self.net;
        self.distance_cache
            .entry(dest)
            .or_insert_with(|| Rc::new(net.cost_to(dest, RouteWeight::Length)))
            .clone()
    }

    fn strand(&mut self, v: usize, reason: String) {
        self.vehicles[v].status = Status::Stranded;
        self.stranded.push((self.vehicles[v].demand.id.clone(), reason));
    }

    fn insert_departures(&mut self) {
        let mut blocked = VecDeque::new();
        while let Some(&v) = self.pending.front() {
            if self.vehicles[v].demand.depart > self.clock {
                break;
            }
            self.pending.pop_front();
            let origin = self.vehicles[v].demand.origin;
            if self.counts[origin] >= self.capacity[origin] {
                blocked.push_back(v);
                continue;
            }
            let dest = self.vehicles[v].demand.dest;
            let remaining = self.remaining_to(dest);
            let distance = self.distance_to(dest);
            let veh = &mut self.vehicles[v];
            veh.distance = distance;
            veh.depart = self.clock;
            veh.route.push(origin);
            veh.remaining = remaining.clone();
            self.departed += 1;
            if !remaining[origin].is_finite() {
                let reason = format!("destination `{}` unreachable", self.net.edge(dest).id);
                self.strand(v, reason);
                continue;
            }
            if matches!(self.router, Router::Shortest) {
                let w = self.cfg.route_weight;
                let route = dijkstra_route(self.net, origin, dest, w).expect("reachable by cost table");
                self.vehicles[v].planned = route.edges;
            }
            self.vehicles[v].status = Status::Driving;
            self.counts[origin] += 1;
            self.queues[origin].push_back(v);
        }
        // Blocked vehicles retry first next step, keeping their order.
        while let Some(v) = blocked.pop_back() {
            self.pending.push_front(v);
        }
    }

    fn advance(&mut self) {
        for e in 0..self.queues.len() {
            if self.queues[e].is_empty() {
                continue;
            }
            let edge = self.net.edge(e);
            // Each vehicle sees the density of the others on its edge.
            let density = (self.counts[e] - 1) as f64 / edge.length;
            let speed = edge_speed(edge.speed, density, self.cfg.jam_density * edge.lanes as f64);
            let mut leader = f64::INFINITY;
            for &v in &self.queues[e] {
                let veh = &mut self.vehicles[v];
                let new = (veh.offset + speed).min(edge.length).min(leader);
                if new - veh.offset < WAITING_THRESHOLD {
                    veh.waiting_steps += 1;
                }
                veh.offset = new;
                leader = new;
            }
        }
    }

    fn decide(&mut self, v: usize) -> Result<Option<usize>> {
        let veh = &self.vehicles[v];
        let current = veh.edge;
        if let Router::Shortest = self.router {
            let pos = veh.route.len();
            return Ok(veh.planned.get(pos).copied());
        }
        let remaining = veh.remaining.clone();
        let here = remaining[current];
        let mut options: Vec<usize> = self
            .net
            .candidate_next_edges(current, &remaining)
            .into_iter()
            .filter(|&s| remaining[s] < here || veh.distance[s] < veh.distance[current])
            .collect();
        if options.len() > 1 {
            let fresh: Vec<usize> = options.iter().copied().filter(|s| !veh.route.contains(s)).collect();
            if !fresh.is_empty() {
                options = fresh;
            }
        }
        match options.len() {
            0 => return Ok(None),
            1 => return Ok(Some(options[0])),
            _ => {}
        }
        let env = EnvContext {
            clock: self.clock,
            weather: self.cfg.weather_at(self.clock),
        };
        let hour = (self.cfg.start_hour + veh.depart as f64 / 3600.0) % 24.0;
        let w = self.cfg.route_weight;
        let mut cands: Vec<Candidate> = options
            .iter()
            .map(|&s| Candidate {
                edge: s,
                features: candidate_features(
                    self.net,
                    s,
                    EdgeState {
                        vehicle_count: self.counts[s],
                    },
                    &veh.demand.profile,
                    hour,
                    &env,
                ),
                remaining: self.net.weight(s, w) + remaining[s],
            })
            .collect();
        let net = self.net;
        cands.sort_by(|a, b| {
            a.remaining
                .total_cmp(&b.remaining)
                .then(net.rank(a.edge).cmp(&net.rank(b.edge)))
        });
        let chosen = match &mut self.router {
            Router::Shortest => unreachable!(),
            Router::Fuzzy(h) => {
                let prefs = junction_preferences(h, &cands)?;
                choose_by_preference(net, &cands, &prefs)
            }
            Router::Tuned {
                hierarchy,
                layout,
                swarm,
            } => {
                let jc = cands
                    .iter()
                    .map(|c| JunctionCandidate {
                        edge: c.edge,
                        features: c.features,
                    })
                    .collect();
                let ctx = JunctionContext::with_order(hierarchy, layout, jc)?;
                swarm.tune_step(&ctx);
                ctx.select(swarm.gbest_position())?
            }
        };
        Ok(Some(cands[chosen].edge))
    }

    /// Moves vehicles across junctions. Each junction serves its approaches
    /// in turn, starting from a different one every step.
    fn transfer(&mut self) -> Result<()> {
        let start = self.clock as usize;
        for node in 0..self.incoming.len() {
            let k = self.incoming[node].len();
            for j in 0..k {
                let e = self.incoming[node][(start + j) % k];
                self.drain(e, node)?;
            }
        }
        Ok(())
    }

    fn drain(&mut self, e: usize, node: usize) -> Result<()> {
        let arrival_time = self.clock + 1;
        while let Some(&v) = self.queues[e].front() {
            let length = self.net.edge(e).length;
            if self.vehicles[v].offset < length {
                break;
            }
            if self.vehicles[v].demand.dest == e {
                self.queues[e].pop_front();
                self.counts[e] -= 1;
                let veh = &mut self.vehicles[v];
                veh.status = Status::Arrived;
                veh.arrival = Some(arrival_time);
                self.arrived += 1;
                self.durations_sum += arrival_time - veh.depart;
                continue;
            }
            let next = match self.vehicles[v].next {
                Some(n) => n,
                None => match self.decide(v)? {
                    Some(n) => {
                        self.vehicles[v].next = Some(n);
                        n
                    }
                    None => {
                        self.queues[e].pop_front();
                        self.counts[e] -= 1;
                        let reason = format!("no way forward from `{}`", self.net.edge(e).id);
                        self.strand(v, reason);
                        continue;
                    }
                },
            };
            if self.counts[next] >= self.capacity[next] || self.credit[e] < 1.0 || self.junction_credit[node] < 1.0 {
                break;
            }
            self.credit[e] -= 1.0;
            self.junction_credit[node] -= 1.0;
            self.queues[e].pop_front();
            self.counts[e] -= 1;
            self.counts[next] += 1;
            self.queues[next].push_back(v);
            let veh = &mut self.vehicles[v];
            veh.edge = next;
            veh.offset = 0.0;
            veh.next = None;
            veh.route.push(next);
        }
        Ok(())
    }

    /// Advances the clock by one second.
    pub fn step(&mut self) -> Result<()> {
        for (e, c) in self.credit.iter_mut().enumerate() {
            let per_step = self.cfg.outflow_rate * self.net.edge(e).lanes as f64;
            *c = (*c + per_step).min(per_step.max(1.0));
        }
        let rate = self.cfg.junction_rate;
        for c in &mut self.junction_credit {
            *c = (*c + rate).min(rate.max(1.0));
        }
        self.insert_departures();
        self.advance();
        self.transfer()?;
        self.clock += 1;
        self.series.push(StepStats {
            step: self.clock,
            departed: self.departed,
            in_network: self.departed - self.arrived - self.stranded.len(),
            arrived: self.arrived,
            stranded: self.stranded.len(),
            avg_travel_time: (self.arrived > 0).then(|| self.durations_sum as f64 / self.arrived as f64),
        });
        Ok(())
    }

    pub fn run(mut self, horizon: u64) -> Result<RunOutput> {
        while self.clock < horizon {
            self.step()?;
        }
        Ok(self.finish())
    }

    fn finish(self) -> RunOutput {
        let net = self.net;
        let mut rows: Vec<(TripRecord, Vec<String>)> = self
            .vehicles
            .iter()
            .map(|v| {
                let record = TripRecord {
                    vehicle_id: v.demand.id.clone(),
                    depart: v.depart,
                    arrival: v.arrival,
                    duration: v.arrival.map(|a| a - v.depart),
                    waiting_steps: v.waiting_steps,
                    route_length: v.route.iter().map(|&e| net.edge(e).length).sum(),
                    edges_count: v.route.len(),
                };
                let route = v.route.iter().map(|&e| net.edge(e).id.clone()).collect();
                (record, route)
            })
            .collect();
        rows.sort_by(|a, b| a.0.vehicle_id.cmp(&b.0.vehicle_id));
        let (records, routes) = rows.into_iter().unzip();
        RunOutput {
            records,
            routes,
            series: self.series,
            stranded: self.stranded,
            horizon: self.clock,
        }
    }
}
