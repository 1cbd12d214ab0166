use std::sync::Arc;

use crate::error::{Error, Result};

use super::km::{defuzzify, km_reduce};
use super::set::{FiringInterval, LinguisticVariable, Universe};

pub const DEFAULT_RESOLUTION: usize = 201;

/// Output sets sampled on the type-reduction grid, shared between clones.
#[derive(Debug)]
struct SampledOutput {
    y: Vec<f64>,
    /// Per output set: (lmf samples, umf samples).
    sets: Vec<(Vec<f64>, Vec<f64>)>,
}

impl SampledOutput {
    fn new(output: &LinguisticVariable, resolution: usize) -> Self {
        let y = output.universe().grid(resolution);
        let sets = output
            .sets()
            .iter()
            .map(|s| {
                (
                    y.iter().map(|&v| s.lower(v)).collect(),
                    y.iter().map(|&v| s.upper(v)).collect(),
                )
            })
            .collect();
        SampledOutput { y, sets }
    }
}

/// Two-input, one-output Mamdani IT2 controller with a total rule table.
#[derive(Debug, Clone)]
pub struct FuzzyLogicUnit {
    name: String,
    inputs: [LinguisticVariable; 2],
    output: LinguisticVariable,
    /// Consequent index for antecedent pair `(i, j)` at `i * n2 + j`.
    table: Vec<usize>,
    resolution: usize,
    sampled: Arc<SampledOutput>,
}

impl PartialEq for FuzzyLogicUnit {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.inputs == other.inputs
            && self.output == other.output
            && self.table == other.table
            && self.resolution == other.resolution
    }
}

impl FuzzyLogicUnit {
    /// Builds a unit from labelled rules `(input1 label, input2 label, output label)`.
    /// Every antecedent pair must appear exactly once.
    pub fn new(
        name: impl Into<String>,
        input1: LinguisticVariable,
        input2: LinguisticVariable,
        output: LinguisticVariable,
        rules: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::InvalidUnit {
            unit: name.clone(),
            reason,
        };
        let n2 = input2.sets().len();
        let mut table = vec![usize::MAX; input1.sets().len() * n2];
        for &(l1, l2, out) in rules {
            let i = input1
                .index_of(l1)
                .ok_or_else(|| bad(format!("unknown label `{l1}` for `{}`", input1.name())))?;
            let j = input2
                .index_of(l2)
                .ok_or_else(|| bad(format!("unknown label `{l2}` for `{}`", input2.name())))?;
            let k = output
                .index_of(out)
                .ok_or_else(|| bad(format!("unknown label `{out}` for `{}`", output.name())))?;
            let slot = &mut table[i * n2 + j];
            if *slot != usize::MAX {
                return Err(bad(format!("duplicate rule for ({l1}, {l2})")));
            }
            *slot = k;
        }
        Self::from_table(name, input1, input2, output, table)
    }

    pub fn from_table(
        name: impl Into<String>,
        input1: LinguisticVariable,
        input2: LinguisticVariable,
        output: LinguisticVariable,
        table: Vec<usize>,
    ) -> Result<Self> {
        let name = name.into();
        let n1 = input1.sets().len();
        let n2 = input2.sets().len();
        if table.len() != n1 * n2 {
            return Err(Error::InvalidUnit {
                unit: name,
                reason: format!("rule table has {} entries, expected {}", table.len(), n1 * n2),
            });
        }
        if let Some(pos) = table.iter().position(|&k| k >= output.sets().len()) {
            let l1 = input1.sets()[pos / n2].label();
            let l2 = input2.sets()[pos % n2].label();
            return Err(Error::InvalidUnit {
                unit: name,
                reason: format!("no rule for ({l1}, {l2})"),
            });
        }
        if output.universe() != Universe::unit() {
            return Err(Error::InvalidUnit {
                unit: name,
                reason: "output universe must be [0, 1]".into(),
            });
        }
        let sampled = Arc::new(SampledOutput::new(&output, DEFAULT_RESOLUTION));
        Ok(FuzzyLogicUnit {
            name,
            inputs: [input1, input2],
            output,
            table,
            resolution: DEFAULT_RESOLUTION,
            sampled,
        })
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidUnit {
                unit: self.name,
                reason: format!("resolution {resolution} must be at least 2"),
            });
        }
        self.resolution = resolution;
        self.sampled = Arc::new(SampledOutput::new(&self.output, resolution));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[LinguisticVariable; 2] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Consequent index for the antecedent pair `(i, j)`.
    pub fn consequent(&self, i: usize, j: usize) -> usize {
        self.table[i * self.inputs[1].sets().len() + j]
    }

    pub fn rule_table(&self) -> &[usize] {
        &self.table
    }

    /// Same unit with replaced variables; the rule table is kept.
    pub fn with_variables(
        &self,
        input1: LinguisticVariable,
        input2: LinguisticVariable,
        output: LinguisticVariable,
    ) -> Result<Self> {
        let unit = Self::from_table(self.name.clone(), input1, input2, output, self.table.clone())?;
        if unit.resolution == self.resolution {
            Ok(unit)
        } else {
            unit.with_resolution(self.resolution)
        }
    }

    /// Aggregated firing interval per output label, in output set order.
    pub fn infer(&self, x1: f64, x2: f64) -> Result<Vec<(usize, FiringInterval)>> {
        let [v1, v2] = &self.inputs;
        v1.check_domain(x1)?;
        v2.check_domain(x2)?;
        let g1: Vec<FiringInterval> = v1.sets().iter().map(|s| s.grade(x1)).collect();
        let g2: Vec<FiringInterval> = v2.sets().iter().map(|s| s.grade(x2)).collect();
        let mut agg = vec![FiringInterval::ZERO; self.output.sets().len()];
        for (i, a) in g1.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g2.iter().enumerate() {
                let k = self.table[i * g2.len() + j];
                agg[k] = agg[k].join(super::set::fire_rule(*a, *b));
            }
        }
        Ok(agg.into_iter().enumerate().collect())
    }

    /// Type-reduced interval `[yl, yr]` for the given crisp inputs.
    pub fn type_reduce(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        let fired = self.infer(x1, x2)?;
        let n = self.sampled.y.len();
        let mut lower = vec![0.0f64; n];
        let mut upper = vec![0.0f64; n];
        for (k, f) in fired {
            if f.is_zero() {
                continue;
            }
            let (ls, us) = &self.sampled.sets[k];
            for i in 0..n {
                lower[i] = lower[i].max(ls[i].min(f.lo()));
                upper[i] = upper[i].max(us[i].min(f.hi()));
            }
        }
        km_reduce(&self.sampled.y, &lower, &upper)
    }

    /// Fuzzify, infer, type-reduce and defuzzify.
    pub fn evaluate(&self, x1: f64, x2: f64) -> Result<f64> {
        let (yl, yr) = self.type_reduce(x1, x2)?;
        Ok(defuzzify(yl, yr))
    }

    pub fn to_type1(&self) -> FuzzyLogicUnit {
        let [v1, v2] = &self.inputs;
        self.with_variables(v1.to_type1(), v2.to_type1(), self.output.to_type1())
            .expect("collapsing the FOU keeps a unit valid")
    }

    pub fn is_type1(&self) -> bool {
        self.inputs
            .iter()
            .chain(std::iter::once(&self.output))
            .all(|v| v.sets().iter().all(|s| s.is_type1()))
    }
}
