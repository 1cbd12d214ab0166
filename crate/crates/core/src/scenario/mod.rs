//! Scenario files: the native JSON format, a SUMO net/route subset and the
//! CSV outputs of a run.

pub mod grid;
mod output;
mod sumo;

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchySpec};
use crate::network::{DriverProfile, EdgeSpec, Node, RoadNetwork};
use crate::pso::PsoConfig;
use crate::sim::{Demand, SimConfig};

pub use output::{parse_tripinfo, write_metrics, write_tripinfo, METRICS_HEADER, TRIPINFO_HEADER};
pub use sumo::{import_sumo_net, import_sumo_routes, Imported};

pub const DEFAULT_HORIZON: u64 = 3600;

/// Network given in place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineNetwork {
    pub nodes: Vec<Node>,
    pub edges: Vec<EdgeSpec>,
    /// Allowed `[from edge, to edge]` turns; omitted means every turn except
    /// U-turns at junctions that offer another way out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connections: Option<Vec<[String; 2]>>,
}

impl InlineNetwork {
    pub fn build(&self) -> Result<RoadNetwork> {
        let pairs: Option<Vec<(String, String)>> = self
            .connections
            .as_ref()
            .map(|c| c.iter().map(|[a, b]| (a.clone(), b.clone())).collect());
        RoadNetwork::new(self.nodes.clone(), self.edges.clone(), pairs.as_deref())
    }

    pub fn from_network(net: &RoadNetwork) -> Self {
        InlineNetwork {
            nodes: net.nodes().to_vec(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    from: net.nodes()[e.from].id.clone(),
                    to: net.nodes()[e.to].id.clone(),
                    length: e.length,
                    speed: e.speed,
                    lanes: e.lanes,
                })
                .collect(),
            connections: Some(net.connections().into_iter().map(|(a, b)| [a, b]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Inline(InlineNetwork),
    /// Path to a SUMO `.net.xml`, relative to the scenario file.
    SumoFile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub id: String,
    pub origin: String,
    pub dest: String,
    /// s.
    pub depart: u64,
    #[serde(default)]
    pub profile: DriverProfile,
}

/// Which end of an event's trips lies in its area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaRule {
    OriginInArea,
    DestInArea,
    Both,
}

/// A burst of extra trips touching a set of edges during a time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandEvent {
    /// Prefix of the generated vehicle ids.
    pub name: String,
    pub area: Vec<String>,
    pub count: usize,
    /// `[start, end]` in seconds, both included.
    pub window: [u64; 2],
    pub rule: AreaRule,
    #[serde(default)]
    pub profile: DriverProfile,
}

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub network: NetworkSource,
    #[serde(default)]
    pub demands: Vec<DemandSpec>,
    #[serde(default)]
    pub demand_events: Vec<DemandEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<HierarchySpec>,
    #[serde(default)]
    pub pso: PsoConfig,
    #[serde(default)]
    pub simulation: SimConfig,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
}

/// Parses native scenario text without resolving file references.
pub fn parse_native(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => Error::Scenario(e.to_string()),
        }
    })
}

/// Canonical pretty-printed form.
pub fn serialize_native(cfg: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("scenario values serialize");
    s.push('\n');
    s
}

/// A scenario with its network built and every reference checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub network: RoadNetwork,
    pub hierarchy: Hierarchy,
}

impl ScenarioConfig {
    /// Parses and validates a scenario file, resolving relative paths
    /// against its directory.
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let cfg = parse_native(&text)?;
        cfg.resolve(path.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(self, base_dir: &Path) -> Result<Scenario> {
        let network = match &self.network {
            NetworkSource::Inline(n) => n.build()?,
            NetworkSource::SumoFile(p) => {
                let full: PathBuf = base_dir.join(p);
                let text = std::fs::read_to_string(&full).map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
                import_sumo_net(&text)?.value
            }
        };
        let edge = |id: &str, what: &str| {
            network
                .edge_index(id)
                .map(|_| ())
                .ok_or_else(|| Error::Scenario(format!("{what} references unknown edge `{id}`")))
        };
        let mut ids = std::collections::HashSet::new();
        for d in &self.demands {
            edge(&d.origin, &format!("demand `{}`", d.id))?;
            edge(&d.dest, &format!("demand `{}`", d.id))?;
            if !ids.insert(d.id.as_str()) {
                return Err(Error::Scenario(format!("duplicate vehicle id `{}`", d.id)));
            }
            check_profile(&d.profile, &d.id)?;
        }
        for ev in &self.demand_events {
            if ev.area.is_empty() {
                return Err(Error::Scenario(format!("event `{}` has an empty area", ev.name)));
            }
            for a in &ev.area {
                edge(a, &format!("event `{}`", ev.name))?;
            }
            if ev.window[0] > ev.window[1] {
                return Err(Error::Scenario(format!(
                    "event `{}` window starts after it ends",
                    ev.name
                )));
            }
            check_profile(&ev.profile, &ev.name)?;
        }
        self.pso.validate()?;
        self.simulation.validate()?;
        let hierarchy = match &self.hierarchy {
            Some(spec) => Hierarchy::build(spec)?,
            None => Hierarchy::default(),
        };
        Ok(Scenario {
            config: self,
            network,
            hierarchy,
        })
    }
}

fn check_profile(p: &DriverProfile, owner: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p.familiarity) || !(p.usual_speed >= 0.0 && p.usual_speed.is_finite()) {
        return Err(Error::Scenario(format!("`{owner}` has an invalid driver profile")));
    }
    Ok(())
}

impl Scenario {
    /// Listed demands followed by the event trips drawn with `seed`.
    pub fn demands(&self, seed: u64) -> Vec<Demand> {
        let net = &self.network;
        let idx = |id: &str| net.edge_index(id).expect("validated");
        let mut out: Vec<Demand> = self
            .config
            .demands
            .iter()
            .map(|d| Demand {
                id: d.id.clone(),
                origin: idx(&d.origin),
                dest: idx(&d.dest),
                depart: d.depart,
                profile: d.profile,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ev in &self.config.demand_events {
            let area: Vec<usize> = ev.area.iter().map(|a| idx(a)).collect();
            for i in 0..ev.count {
                let depart = rng.random_range(ev.window[0]..=ev.window[1]);
                let (origin, dest) = sample_trip(net, &area, ev.rule, &mut rng);
                out.push(Demand {
                    id: format!("{}.{i}", ev.name),
                    origin,
                    dest,
                    depart,
                    profile: ev.profile,
                });
            }
        }
        out
    }
}

/// Draws an origin/destination pair honouring `rule`, preferring pairs of
/// distinct, connected edges (up to a fixed number of attempts).
fn sample_trip(net: &RoadNetwork, area: &[usize], rule: AreaRule, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = net.edge_count();
    let pick = |inside: bool, rng: &mut ChaCha8Rng| {
        if inside {
            area[rng.random_range(0..area.len())]
        } else {
            rng.random_range(0..n)
        }
    };
    let (o_in, d_in) = match rule {
        AreaRule::OriginInArea => (true, false),
        AreaRule::DestInArea => (false, true),
        AreaRule::Both => (true, true),
    };
    let mut last = (0, 0);
    for _ in 0..64 {
        let o = pick(o_in, rng);
        let d = pick(d_in, rng);
        last = (o, d);
        if o != d && crate::network::dijkstra_route(net, o, d, Default::default()).is_some() {
            break;
        }
    }
    last
}

#[cfg(test)]
mod tests;
