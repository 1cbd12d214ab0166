use crate::error::{Error, Result};
use crate::fuzzy::{FouShape, FuzzyLogicUnit, It2Set, LinguisticVariable, Trapezoid};

use super::Hierarchy;

/// `(a, b, c, d, lmf_height, inset)` for every set.
pub const PARAMS_PER_SET: usize = 6;
pub const LMF_HEIGHT_BOUNDS: (f64, f64) = (0.5, 1.0);
pub const INSET_BOUNDS: (f64, f64) = (0.0, 0.25);

/// Membership parameters of a set of units, flattened in evaluation order
/// (unit, then input 1, input 2, output, then set), with per-value bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    scope: Vec<String>,
    values: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn unit_variables(u: &FuzzyLogicUnit) -> [&LinguisticVariable; 3] {
    let [a, b] = u.inputs();
    [a, b, u.output()]
}

impl ParameterVector {
    pub(super) fn flatten(h: &Hierarchy, scope: &[&str]) -> Result<Self> {
        for name in scope {
            if h.unit_index(name).is_none() {
                return Err(Error::Parameters(format!("unknown unit `{name}`")));
            }
        }
        let type1 = h.is_type1();
        let mut pv = ParameterVector {
            scope: Vec::new(),
            values: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        };
        for name in h.evaluation_order() {
            if !scope.contains(&name) {
                continue;
            }
            let unit = h.unit(name).unwrap();
            pv.scope.push(name.to_string());
            for var in unit_variables(unit) {
                let u = var.universe();
                for set in var.sets() {
                    let shape = set.shape().ok_or_else(|| {
                        Error::Parameters(format!(
                            "set `{}` of `{}` has no parametric footprint",
                            set.label(),
                            var.name()
                        ))
                    })?;
                    let (hl, hh) = if type1 { (1.0, 1.0) } else { LMF_HEIGHT_BOUNDS };
                    let (il, ih) = if type1 { (0.0, 0.0) } else { INSET_BOUNDS };
                    let mut push = |v: f64, lo: f64, hi: f64| {
                        pv.values.push(v);
                        pv.lower.push(lo.min(v));
                        pv.upper.push(hi.max(v));
                    };
                    for x in set.umf().breakpoints() {
                        push(x, u.lo, u.hi);
                    }
                    push(shape.lmf_height, hl, hh);
                    push(shape.inset, il, ih);
                }
            }
        }
        Ok(pv)
    }

    pub fn scope(&self) -> &[String] {
        &self.scope
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same layout and bounds with new values; bounds are checked on decode.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Parameters(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Ok(ParameterVector { values, ..self.clone() })
    }

    /// Start offsets of every `(a, b, c, d)` quadruple.
    pub fn trapezoid_starts(&self) -> Vec<usize> {
        (0..self.values.len()).step_by(PARAMS_PER_SET).collect()
    }

    /// Rebuilds the scoped units. Fails on out-of-bounds values or unordered
    /// breakpoints; the error reports what sorting would have produced.
    pub(crate) fn decode(&self, h: &Hierarchy) -> Result<Vec<(usize, FuzzyLogicUnit)>> {
        for (k, &v) in self.values.iter().enumerate() {
            if !(v >= self.lower[k] && v <= self.upper[k]) {
                return Err(Error::Parameters(format!(
                    "value {v} at index {k} outside [{}, {}]",
                    self.lower[k], self.upper[k]
                )));
            }
        }
        let mut cursor = 0;
        let mut out = Vec::with_capacity(self.scope.len());
        for name in &self.scope {
            let idx = h
                .unit_index(name)
                .ok_or_else(|| Error::Parameters(format!("unknown unit `{name}`")))?;
            let unit = &h.units()[idx];
            let mut vars = Vec::with_capacity(3);
            for var in unit_variables(unit) {
                let universe = var.universe();
                let mut sets = Vec::with_capacity(var.sets().len());
                for set in var.sets() {
                    let p = self
                        .values
                        .get(cursor..cursor + PARAMS_PER_SET)
                        .ok_or_else(|| Error::Parameters("parameter vector shorter than its scope".into()))?;
                    cursor += PARAMS_PER_SET;
                    if !(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]) {
                        let mut sorted = [p[0], p[1], p[2], p[3]];
                        sorted.sort_by(f64::total_cmp);
                        return Err(Error::Parameters(format!(
                            "set `{}` of `{}` in `{name}`: breakpoints ({}, {}, {}, {}) unordered; repair gives {:?}",
                            set.label(),
                            var.name(),
                            p[0],
                            p[1],
                            p[2],
                            p[3],
                            sorted
                        )));
                    }
                    let umf = Trapezoid::normal(p[0], p[1], p[2], p[3])?;
                    let shape = FouShape {
                        lmf_height: p[4],
                        inset: p[5],
                    };
                    sets.push(It2Set::with_shape(set.label(), umf, shape, &universe)?);
                }
                vars.push(LinguisticVariable::new_unchecked_coverage(var.name(), universe, sets)?);
            }
            let out_var = vars.pop().unwrap();
            let in2 = vars.pop().unwrap();
            let in1 = vars.pop().unwrap();
            out.push((idx, unit.with_variables(in1, in2, out_var)?));
        }
        if cursor != self.values.len() {
            return Err(Error::Parameters("parameter vector longer than its scope".into()));
        }
        Ok(out)
    }
}
