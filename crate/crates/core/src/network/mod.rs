//! Directed road graph with connection-level turning rules, shortest paths
//! over edges and per-junction route assignment.

mod assign;

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assign::{
    assign_next_edge, candidate_features, choose_by_preference, junction_preferences, Candidate, DriverProfile,
    EdgeState, EnvContext,
};

/// Effective vehicle length including the gap, m.
pub const VEHICLE_SPACING: f64 = 7.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    /// m.
    pub length: f64,
    /// m/s.
    pub speed: f64,
    #[serde(default = "one_lane")]
    pub lanes: u32,
}

fn one_lane() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub speed: f64,
    pub lanes: u32,
}

/// Cost used by shortest-path searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteWeight {
    /// Free-flow traversal time, s.
    #[default]
    Time,
    /// Length, m.
    Length,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// Position of each edge when edges are sorted by id.
    rank: Vec<usize>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    max_speed: f64,
}

impl RoadNetwork {
    /// Builds and validates a network. Without explicit connections every
    /// incoming edge connects to every outgoing edge at its junction except
    /// the reverse edge, which is kept only when it is the sole way out.
    pub fn new(nodes: Vec<Node>, edges: Vec<EdgeSpec>, connections: Option<&[(String, String)]>) -> Result<Self> {
        let net_err = |m: String| Error::Network(m);
        let mut node_index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(net_err(format!("duplicate node `{}`", n.id)));
            }
        }
        let mut edge_index = HashMap::new();
        let mut built = Vec::with_capacity(edges.len());
        for (i, e) in edges.into_iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(net_err(format!("duplicate edge `{}`", e.id)));
            }
            let node = |id: &str| {
                node_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| net_err(format!("edge `{}` references unknown node `{id}`", e.id)))
            };
            let (from, to) = (node(&e.from)?, node(&e.to)?);
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(net_err(format!("edge `{}` has non-positive length {}", e.id, e.length)));
            }
            if !(e.speed > 0.0 && e.speed.is_finite()) {
                return Err(net_err(format!("edge `{}` has non-positive speed {}", e.id, e.speed)));
            }
            if e.lanes == 0 {
                return Err(net_err(format!("edge `{}` has no lanes", e.id)));
            }
            built.push(Edge {
                id: e.id,
                from,
                to,
                length: e.length,
                speed: e.speed,
                lanes: e.lanes,
            });
        }
        let n = built.len();
        let mut successors = vec![Vec::new(); n];
        match connections {
            Some(pairs) => {
                for (a, b) in pairs {
                    let find = |id: &String| {
                        edge_index
                            .get(id)
                            .copied()
                            .ok_or_else(|| net_err(format!("connection references unknown edge `{id}`")))
                    };
                    let (i, j) = (find(a)?, find(b)?);
                    if built[i].to != built[j].from {
                        return Err(net_err(format!("connection `{a}` -> `{b}` does not share a junction")));
                    }
                    if !successors[i].contains(&j) {
                        successors[i].push(j);
                    }
                }
            }
            None => {
                let mut outgoing = vec![Vec::new(); nodes.len()];
                for (j, e) in built.iter().enumerate() {
                    outgoing[e.from].push(j);
                }
                for (i, e) in built.iter().enumerate() {
                    let outs = &outgoing[e.to];
                    let forward: Vec<usize> = outs.iter().copied().filter(|&j| built[j].to != e.from).collect();
                    successors[i] = if forward.is_empty() { outs.clone() } else { forward };
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| built[a].id.cmp(&built[b].id));
        let mut rank = vec![0; n];
        for (r, &e) in order.iter().enumerate() {
            rank[e] = r;
        }
        let mut predecessors = vec![Vec::new(); n];
        for (i, succ) in successors.iter_mut().enumerate() {
            succ.sort_by_key(|&j| rank[j]);
            for &j in succ.iter() {
                predecessors[j].push(i);
            }
        }
        let max_speed = built.iter().map(|e| e.speed).fold(0.0, f64::max);
        Ok(RoadNetwork {
            nodes,
            edges: built,
            node_index,
            edge_index,
            rank,
            successors,
            predecessors,
            max_speed,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn lane_count(&self) -> u32 {
        self.edges.iter().map(|e| e.lanes).sum()
    }

    pub fn connection_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Allowed `(from edge, to edge)` id pairs.
    pub fn connections(&self) -> Vec<(String, String)> {
        let mut out = Vec::with_capacity(self.connection_count());
        for (i, succ) in self.successors.iter().enumerate() {
            for &j in succ {
                out.push((self.edges[i].id.clone(), self.edges[j].id.clone()));
            }
        }
        out
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Position of edge `e` in id order; used to break ties.
    pub fn rank(&self, e: usize) -> usize {
        self.rank[e]
    }

    /// Edges reachable from the end of `e`, in id order.
    pub fn successors(&self, e: usize) -> &[usize] {
        &self.successors[e]
    }

    pub fn predecessors(&self, e: usize) -> &[usize] {
        &self.predecessors[e]
    }

    /// Highest speed limit in the network.
    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    /// Vehicles that fit on `e` at standstill.
    pub fn capacity(&self, e: usize) -> u32 {
        let edge = &self.edges[e];
        ((edge.length * edge.lanes as f64 / VEHICLE_SPACING).ceil() as u32).max(1)
    }

    pub fn weight(&self, e: usize, w: RouteWeight) -> f64 {
        let edge = &self.edges[e];
        match w {
            RouteWeight::Time => edge.length / edge.speed,
            RouteWeight::Length => edge.length,
        }
    }

    /// Cost from the end of every edge to the end of `dest`
    /// (infinite where `dest` is unreachable).
    pub fn cost_to(&self, dest: usize, w: RouteWeight) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.edges.len()];
        let mut heap = BinaryHeap::new();
        dist[dest] = 0.0;
        heap.push(Reverse(Key(0.0, self.rank[dest], dest)));
        while let Some(Reverse(Key(d, _, e))) = heap.pop() {
            if d > dist[e] {
                continue;
            }
            let through = d + self.weight(e, w);
            for &p in &self.predecessors[e] {
                if through < dist[p] {
                    dist[p] = through;
                    heap.push(Reverse(Key(through, self.rank[p], p)));
                }
            }
        }
        dist
    }

    /// Successors of `current` from which `dest` can be reached, given the
    /// table returned by [`RoadNetwork::cost_to`] for `dest`.
    pub fn candidate_next_edges(&self, current: usize, remaining: &[f64]) -> Vec<usize> {
        self.successors[current]
            .iter()
            .copied()
            .filter(|&s| remaining[s].is_finite())
            .collect()
    }
}

/// Heap key ordered by cost, then edge rank.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, usize, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub edges: Vec<usize>,
    /// Cost of every edge after the origin.
    pub cost: f64,
}

impl Route {
    pub fn length(&self, net: &RoadNetwork) -> f64 {
        self.edges.iter().map(|&e| net.edge(e).length).sum()
    }
}

/// Least-cost connection-respecting route from `origin` to `dest`, both
/// included; `None` when `dest` cannot be reached. Equal-cost alternatives
/// resolve towards edges that sort first by id.
pub fn dijkstra_route(net: &RoadNetwork, origin: usize, dest: usize, w: RouteWeight) -> Option<Route> {
    let n = net.edge_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(Reverse(Key(0.0, net.rank(origin), origin)));
    while let Some(Reverse(Key(d, _, e))) = heap.pop() {
        if d > dist[e] {
            continue;
        }
        if e == dest {
            break;
        }
        for &s in net.successors(e) {
            let nd = d + net.weight(s, w);
            if nd < dist[s] {
                dist[s] = nd;
                prev[s] = e;
                heap.push(Reverse(Key(nd, net.rank(s), s)));
            }
        }
    }
    if !dist[dest].is_finite() {
        return None;
    }
    let mut edges = vec![dest];
    let mut e = dest;
    while e != origin {
        e = prev[e];
        edges.push(e);
    }
    edges.reverse();
    Some(Route {
        edges,
        cost: dist[dest],
    })
}
