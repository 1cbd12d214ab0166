use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hierarchy::{CandidateFeatures, Hierarchy};
use crate::pso::junction_features;

use super::RoadNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverProfile {
    pub familiarity: f64,
    /// m/s.
    pub usual_speed: f64,
}

impl Default for DriverProfile {
    fn default() -> Self {
        DriverProfile {
            familiarity: 0.5,
            usual_speed: 20.0,
        }
    }
}

/// Conditions shared by every vehicle at one simulation second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvContext {
    pub clock: u64,
    pub weather: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeState {
    pub vehicle_count: u32,
}

impl EdgeState {
    /// veh/m.
    pub fn density(&self, length: f64) -> f64 {
        self.vehicle_count as f64 / length
    }
}

/// A possible next edge for one vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub edge: usize,
    /// Observed features; density in veh/m.
    pub features: CandidateFeatures,
    /// Free-flow cost from the start of this edge to the end of the destination.
    pub remaining: f64,
}

pub fn candidate_features(
    net: &RoadNetwork,
    edge: usize,
    state: EdgeState,
    profile: &DriverProfile,
    departure_hour: f64,
    env: &EnvContext,
) -> CandidateFeatures {
    let e = net.edge(edge);
    CandidateFeatures {
        density: state.density(e.length),
        max_speed_norm: e.speed / net.max_speed(),
        familiarity: profile.familiarity,
        usual_speed: profile.usual_speed,
        departure_time: departure_hour,
        weather: env.weather,
    }
}

/// Index of the candidate with the highest preference; ties go to the lower
/// remaining cost, then to the edge that sorts first by id.
pub fn choose_by_preference(net: &RoadNetwork, candidates: &[Candidate], prefs: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..candidates.len() {
        let (a, b) = (&candidates[i], &candidates[best]);
        let better = prefs[i] > prefs[best]
            || (prefs[i] == prefs[best]
                && (a.remaining < b.remaining || (a.remaining == b.remaining && net.rank(a.edge) < net.rank(b.edge))));
        if better {
            best = i;
        }
    }
    best
}

/// Preference of every candidate, densities taken relative to the junction.
pub fn junction_preferences(h: &Hierarchy, candidates: &[Candidate]) -> Result<Vec<f64>> {
    let raw: Vec<CandidateFeatures> = candidates.iter().map(|c| c.features).collect();
    junction_features(&raw)
        .iter()
        .map(|f| h.evaluate_preference(&h.clamp_features(f)))
        .collect()
}

/// The edge the controller prefers among `candidates` (non-empty).
pub fn assign_next_edge(net: &RoadNetwork, h: &Hierarchy, candidates: &[Candidate]) -> Result<usize> {
    if candidates.len() == 1 {
        return Ok(candidates[0].edge);
    }
    let prefs = junction_preferences(h, candidates)?;
    Ok(candidates[choose_by_preference(net, candidates, &prefs)].edge)
}
