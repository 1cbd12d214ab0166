use crate::error::{Error, Result};
use crate::hierarchy::{apply_parameters, CandidateFeatures, Hierarchy, ParameterVector};

use super::Objective;

/// Relative densities are snapped to this grid so that rescaling every
/// density by a common factor reproduces them bit for bit.
const DENSITY_GRID: f64 = 4_294_967_296.0;

/// Rescales each density by the largest one in the set (all zero stays zero).
pub fn junction_features(candidates: &[CandidateFeatures]) -> Vec<CandidateFeatures> {
    let max = candidates.iter().map(|c| c.density).fold(0.0, f64::max);
    candidates
        .iter()
        .map(|c| {
            let density = if max > 0.0 {
                (c.density / max * DENSITY_GRID).round() / DENSITY_GRID
            } else {
                0.0
            };
            CandidateFeatures { density, ..*c }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionCandidate {
    pub edge: usize,
    /// Observed features; density in veh/m.
    pub features: CandidateFeatures,
}

/// One routing decision, scored for a parameter vector by the density share
/// of the candidate the tuned controller would pick.
#[derive(Debug, Clone)]
pub struct JunctionContext<'h> {
    hierarchy: &'h Hierarchy,
    layout: ParameterVector,
    candidates: Vec<JunctionCandidate>,
    inputs: Vec<CandidateFeatures>,
    root_inputs: Option<Vec<[f64; 2]>>,
}

impl<'h> JunctionContext<'h> {
    /// Candidates are ordered by edge id; ties in preference go to the first.
    pub fn new(
        hierarchy: &'h Hierarchy,
        layout: &ParameterVector,
        mut candidates: Vec<JunctionCandidate>,
    ) -> Result<Self> {
        candidates.sort_by_key(|c| c.edge);
        Self::with_order(hierarchy, layout, candidates)
    }

    /// Keeps the caller's candidate order for tie-breaking.
    pub fn with_order(
        hierarchy: &'h Hierarchy,
        layout: &ParameterVector,
        candidates: Vec<JunctionCandidate>,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Pso("junction has no candidates".into()));
        }
        if let Some(c) = candidates
            .iter()
            .find(|c| !(c.features.density >= 0.0 && c.features.density.is_finite()))
        {
            return Err(Error::Pso(format!(
                "candidate edge {} has invalid density {}",
                c.edge, c.features.density
            )));
        }
        let raw: Vec<CandidateFeatures> = candidates.iter().map(|c| c.features).collect();
        let inputs: Vec<CandidateFeatures> = junction_features(&raw)
            .iter()
            .map(|f| hierarchy.clamp_features(f))
            .collect();
        let root_name = hierarchy.root().name();
        let root_inputs = if layout.scope().len() == 1 && layout.scope()[0] == root_name {
            Some(
                inputs
                    .iter()
                    .map(|f| hierarchy.root_inputs(f))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(JunctionContext {
            hierarchy,
            layout: layout.clone(),
            candidates,
            inputs,
            root_inputs,
        })
    }

    pub fn candidates(&self) -> &[JunctionCandidate] {
        &self.candidates
    }

    pub fn layout(&self) -> &ParameterVector {
        &self.layout
    }

    /// Preference of every candidate under the parameters `position`.
    pub fn preferences(&self, position: &[f64]) -> Result<Vec<f64>> {
        let p = self.layout.with_values(position.to_vec())?;
        match &self.root_inputs {
            Some(root_inputs) => {
                let replaced = p.decode(self.hierarchy)?;
                let (_, root) = &replaced[0];
                root_inputs
                    .iter()
                    .map(|&x| Hierarchy::evaluate_root_with(root, x))
                    .collect()
            }
            None => {
                let h = apply_parameters(self.hierarchy, &p)?;
                self.inputs.iter().map(|f| h.evaluate_preference(f)).collect()
            }
        }
    }

    /// Index of the preferred candidate; the earliest wins ties.
    pub fn select(&self, position: &[f64]) -> Result<usize> {
        let prefs = self.preferences(position)?;
        Ok(argmax(&prefs))
    }

    fn share(&self, i: usize) -> f64 {
        let total: f64 = self.inputs.iter().map(|f| f.density).sum();
        if total > 0.0 {
            self.inputs[i].density / total
        } else {
            1.0 / self.inputs.len() as f64
        }
    }

    /// Density share of the selected candidate; 1 if `position` is invalid.
    pub fn fitness(&self, position: &[f64]) -> f64 {
        match self.select(position) {
            Ok(i) => self.share(i),
            Err(_) => 1.0,
        }
    }

    /// The smallest share any selection can achieve.
    pub fn best_share(&self) -> f64 {
        (0..self.inputs.len())
            .map(|i| self.share(i))
            .fold(f64::INFINITY, f64::min)
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

impl Objective for JunctionContext<'_> {
    fn fitness(&self, x: &[f64]) -> f64 {
        JunctionContext::fitness(self, x)
    }

    fn lower_bound(&self) -> Option<f64> {
        Some(self.best_share())
    }
}
