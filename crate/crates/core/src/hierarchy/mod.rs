//! Hierarchical preference controller built from two-input fuzzy units.

mod params;
pub mod spec;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FouShape, FuzzyLogicUnit, It2Set, LinguisticVariable, Trapezoid, Universe};

pub use params::ParameterVector;
pub use spec::{HierarchySpec, InputSource, RuleSpec, SetSpec, UnitSpec, VariableSpec};

/// Output used when a unit's inputs fall in a dead zone of its sets.
pub const NEUTRAL_PREFERENCE: f64 = 0.5;

/// The six leaf inputs of the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Density,
    MaxSpeedNorm,
    Familiarity,
    UsualSpeed,
    DepartureTime,
    Weather,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::Density,
        Feature::MaxSpeedNorm,
        Feature::Familiarity,
        Feature::UsualSpeed,
        Feature::DepartureTime,
        Feature::Weather,
    ];
}

/// Inputs describing one candidate edge for one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateFeatures {
    /// Density of the candidate edge. Observed values are veh/m; junction
    /// routing rescales them by the busiest candidate before evaluation.
    pub density: f64,
    /// Speed limit over the network maximum.
    pub max_speed_norm: f64,
    pub familiarity: f64,
    /// m/s.
    pub usual_speed: f64,
    /// Hour of day.
    pub departure_time: f64,
    pub weather: f64,
}

impl CandidateFeatures {
    pub fn get(&self, f: Feature) -> f64 {
        match f {
            Feature::Density => self.density,
            Feature::MaxSpeedNorm => self.max_speed_norm,
            Feature::Familiarity => self.familiarity,
            Feature::UsualSpeed => self.usual_speed,
            Feature::DepartureTime => self.departure_time,
            Feature::Weather => self.weather,
        }
    }

    fn get_mut(&mut self, f: Feature) -> &mut f64 {
        match f {
            Feature::Density => &mut self.density,
            Feature::MaxSpeedNorm => &mut self.max_speed_norm,
            Feature::Familiarity => &mut self.familiarity,
            Feature::UsualSpeed => &mut self.usual_speed,
            Feature::DepartureTime => &mut self.departure_time,
            Feature::Weather => &mut self.weather,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Source {
    Feature(Feature),
    Unit(usize),
}

/// Evaluable DAG of fuzzy units with a single root.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    units: Vec<FuzzyLogicUnit>,
    sources: Vec<[Source; 2]>,
    order: Vec<usize>,
    root: usize,
}

fn build_variable(v: &VariableSpec) -> Result<LinguisticVariable> {
    let universe = Universe::new(v.universe[0], v.universe[1])?;
    let sets = v
        .sets
        .iter()
        .map(|s| {
            let [a, b, c, d] = s.umf;
            It2Set::with_shape(
                s.label.clone(),
                Trapezoid::normal(a, b, c, d)?,
                FouShape {
                    lmf_height: s.lmf_height,
                    inset: s.inset,
                },
                &universe,
            )
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Hierarchy(format!("variable `{}`: {e}", v.name)))?;
    LinguisticVariable::new(v.name.clone(), universe, sets)
}

fn build_unit(u: &UnitSpec) -> Result<FuzzyLogicUnit> {
    let in1 = build_variable(&u.inputs[0].variable)?;
    let in2 = build_variable(&u.inputs[1].variable)?;
    let out = build_variable(&u.output)?;
    let rules: Vec<(&str, &str, &str)> = u
        .rules
        .iter()
        .map(|r| (r.when[0].as_str(), r.when[1].as_str(), r.then.as_str()))
        .collect();
    let unit = FuzzyLogicUnit::new(u.name.clone(), in1, in2, out, &rules)?;
    match u.resolution {
        Some(n) => unit.with_resolution(n),
        None => Ok(unit),
    }
}

/// Validates `spec` and fixes a deterministic evaluation order.
pub fn build_hierarchy(spec: &HierarchySpec) -> Result<Hierarchy> {
    Hierarchy::build(spec)
}

impl Hierarchy {
    pub fn build(spec: &HierarchySpec) -> Result<Self> {
        let err = |m: String| Error::Hierarchy(m);
        if spec.units.is_empty() {
            return Err(err("no units".into()));
        }
        let mut index = HashMap::new();
        for (i, u) in spec.units.iter().enumerate() {
            if index.insert(u.name.as_str(), i).is_some() {
                return Err(err(format!("duplicate unit `{}`", u.name)));
            }
        }
        let root = *index
            .get(spec.root.as_str())
            .ok_or_else(|| err(format!("root `{}` is not a unit", spec.root)))?;

        let mut sources = Vec::with_capacity(spec.units.len());
        let mut feature_uses: HashMap<Feature, usize> = HashMap::new();
        for u in &spec.units {
            let mut pair = [Source::Feature(Feature::Density); 2];
            for (slot, input) in u.inputs.iter().enumerate() {
                pair[slot] = match &input.source {
                    InputSource::Feature(f) => {
                        *feature_uses.entry(*f).or_default() += 1;
                        Source::Feature(*f)
                    }
                    InputSource::Unit(name) => {
                        let j = *index
                            .get(name.as_str())
                            .ok_or_else(|| err(format!("unit `{}` reads from unknown unit `{name}`", u.name)))?;
                        if input.variable.universe != [0.0, 1.0] {
                            return Err(err(format!(
                                "unit `{}` input fed by `{name}` must have universe [0, 1]",
                                u.name
                            )));
                        }
                        Source::Unit(j)
                    }
                };
            }
            sources.push(pair);
        }
        if let Some(f) = Feature::ALL.iter().find(|f| !feature_uses.contains_key(f)) {
            return Err(err(format!("leaf feature `{f:?}` is not consumed")));
        }
        if let Some((f, n)) = feature_uses.iter().filter(|(_, &n)| n > 1).min() {
            return Err(err(format!("leaf feature `{f:?}` is consumed {n} times")));
        }

        let order = topological_order(&sources).map_err(|stuck| {
            let names: Vec<&str> = stuck.iter().map(|&i| spec.units[i].name.as_str()).collect();
            err(format!("cycle through units {names:?}"))
        })?;

        let mut consumed = vec![false; spec.units.len()];
        for pair in &sources {
            for s in pair {
                if let Source::Unit(j) = s {
                    consumed[*j] = true;
                }
            }
        }
        if consumed[root] {
            return Err(err(format!("root `{}` feeds another unit", spec.root)));
        }
        if let Some(i) = (0..consumed.len()).find(|&i| i != root && !consumed[i]) {
            return Err(err(format!(
                "unit `{}` is not consumed and is not the root",
                spec.units[i].name
            )));
        }

        let units = spec.units.iter().map(build_unit).collect::<Result<Vec<_>>>()?;
        Ok(Hierarchy {
            units,
            sources,
            order,
            root,
        })
    }

    pub fn units(&self) -> &[FuzzyLogicUnit] {
        &self.units
    }

    pub fn unit(&self, name: &str) -> Option<&FuzzyLogicUnit> {
        self.units.iter().find(|u| u.name() == name)
    }

    pub fn unit_index(&self, name: &str) -> Option<usize> {
        self.units.iter().position(|u| u.name() == name)
    }

    pub fn root(&self) -> &FuzzyLogicUnit {
        &self.units[self.root]
    }

    pub fn root_index(&self) -> usize {
        self.root
    }

    /// Unit names in evaluation order.
    pub fn evaluation_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.units[i].name()).collect()
    }

    /// Universe of the unit input that consumes `f`.
    pub fn feature_universe(&self, f: Feature) -> Universe {
        for (u, pair) in self.sources.iter().enumerate() {
            for (slot, s) in pair.iter().enumerate() {
                if *s == Source::Feature(f) {
                    return self.units[u].inputs()[slot].universe();
                }
            }
        }
        unreachable!("every feature is consumed by construction")
    }

    /// Clamps each feature into the universe of its consumer.
    pub fn clamp_features(&self, f: &CandidateFeatures) -> CandidateFeatures {
        let mut out = *f;
        for feat in Feature::ALL {
            let v = out.get_mut(feat);
            *v = self.feature_universe(feat).clamp(*v);
        }
        out
    }

    fn run_unit(unit: &FuzzyLogicUnit, x1: f64, x2: f64) -> Result<f64> {
        match unit.evaluate(x1, x2) {
            Err(Error::NoRuleFired) => Ok(NEUTRAL_PREFERENCE),
            other => other,
        }
    }

    fn eval_in_order(&self, order: &[usize], f: &CandidateFeatures, skip_root: bool) -> Result<Vec<f64>> {
        let mut out = vec![f64::NAN; self.units.len()];
        for &u in order {
            if skip_root && u == self.root {
                continue;
            }
            let [x1, x2] = self.input_values(u, f, &out);
            out[u] = Self::run_unit(&self.units[u], x1, x2)?;
        }
        Ok(out)
    }

    fn input_values(&self, u: usize, f: &CandidateFeatures, out: &[f64]) -> [f64; 2] {
        self.sources[u].map(|s| match s {
            Source::Feature(feat) => f.get(feat),
            Source::Unit(j) => out[j],
        })
    }

    /// Preference index of a candidate: the root unit's crisp output.
    pub fn evaluate_preference(&self, f: &CandidateFeatures) -> Result<f64> {
        let out = self.eval_in_order(&self.order, f, false)?;
        Ok(out[self.root])
    }

    /// Crisp inputs reaching the root unit.
    pub fn root_inputs(&self, f: &CandidateFeatures) -> Result<[f64; 2]> {
        let out = self.eval_in_order(&self.order, f, true)?;
        Ok(self.input_values(self.root, f, &out))
    }

    /// Evaluates `root` in place of the root unit on precomputed inputs.
    pub fn evaluate_root_with(root: &FuzzyLogicUnit, inputs: [f64; 2]) -> Result<f64> {
        Self::run_unit(root, inputs[0], inputs[1])
    }

    /// Every lower membership function replaced by its upper one.
    pub fn degenerate_to_t1(&self) -> Hierarchy {
        Hierarchy {
            units: self.units.iter().map(FuzzyLogicUnit::to_type1).collect(),
            sources: self.sources.clone(),
            order: self.order.clone(),
            root: self.root,
        }
    }

    pub fn is_type1(&self) -> bool {
        self.units.iter().all(FuzzyLogicUnit::is_type1)
    }

    fn with_units(&self, replaced: Vec<(usize, FuzzyLogicUnit)>) -> Hierarchy {
        let mut h = self.clone();
        for (i, u) in replaced {
            h.units[i] = u;
        }
        h
    }
}

impl Default for Hierarchy {
    fn default() -> Self {
        Hierarchy::build(&HierarchySpec::default()).expect("default hierarchy is valid")
    }
}

/// Kahn's algorithm, always releasing the lowest-index ready unit first.
/// On a cycle returns the units that could not be ordered.
fn topological_order(sources: &[[Source; 2]]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = sources.len();
    let mut pending = vec![0usize; n];
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, pair) in sources.iter().enumerate() {
        for s in pair {
            if let Source::Unit(j) = s {
                pending[u] += 1;
                consumers[*j].push(u);
            }
        }
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let Some(next) = (0..n).find(|&u| !done[u] && pending[u] == 0) else {
            return Err((0..n).filter(|&u| !done[u]).collect());
        };
        done[next] = true;
        order.push(next);
        for &c in &consumers[next] {
            pending[c] -= 1;
        }
    }
    Ok(order)
}

/// Flattened membership parameters of the units named in `scope`.
pub fn flatten_parameters(h: &Hierarchy, scope: &[&str]) -> Result<ParameterVector> {
    ParameterVector::flatten(h, scope)
}

/// New hierarchy with the scoped units rebuilt from `p`.
pub fn apply_parameters(h: &Hierarchy, p: &ParameterVector) -> Result<Hierarchy> {
    let replaced = p.decode(h)?;
    Ok(h.with_units(replaced))
}

#[cfg(test)]
mod tests;
