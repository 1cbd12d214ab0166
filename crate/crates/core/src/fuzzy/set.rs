use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` a linguistic variable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub lo: f64,
    pub hi: f64,
}

impl Universe {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidSet(format!(
                "universe [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Universe { lo, hi })
    }

    pub fn unit() -> Self {
        Universe { lo: 0.0, hi: 1.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` equally spaced points from `lo` to `hi`, both included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two points");
        let step = self.width() / (n - 1) as f64;
        let mut g: Vec<f64> = (0..n).map(|i| self.lo + step * i as f64).collect();
        g[n - 1] = self.hi;
        g
    }
}

/// Trapezoidal membership function: 0 outside `[a, d]`, `h` on `[b, c]`,
/// linear in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    h: f64,
}

impl Trapezoid {
    pub fn new(a: f64, b: f64, c: f64, d: f64, h: f64) -> Result<Self> {
        if ![a, b, c, d, h].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSet("non-finite trapezoid parameter".into()));
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(Error::InvalidSet(format!(
                "breakpoints ({a}, {b}, {c}, {d}) are not ordered"
            )));
        }
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidSet(format!("height {h} not in (0, 1]")));
        }
        Ok(Trapezoid { a, b, c, d, h })
    }

    /// Unit-height trapezoid.
    pub fn normal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a, b, c, d, 1.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.a || x > self.d {
            0.0
        } else if x >= self.b && x <= self.c {
            self.h
        } else if x < self.b {
            self.h * (x - self.a) / (self.b - self.a)
        } else {
            self.h * (self.d - x) / (self.d - self.c)
        }
    }

    pub fn breakpoints(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn height(&self) -> f64 {
        self.h
    }

    pub fn with_height(&self, h: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.c, self.d, h)
    }
}

/// Parametric footprint of uncertainty: the lower membership function is the
/// upper one contracted towards its plateau centre by `1 - 2 * inset` and
/// scaled to `lmf_height`. Shoulders lying on a universe bound are kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FouShape {
    pub lmf_height: f64,
    pub inset: f64,
}

impl FouShape {
    pub const TYPE1: FouShape = FouShape {
        lmf_height: 1.0,
        inset: 0.0,
    };

    pub fn lower_of(&self, umf: &Trapezoid, universe: &Universe) -> Result<Trapezoid> {
        if !(0.0..0.5).contains(&self.inset) {
            return Err(Error::InvalidSet(format!("inset {} not in [0, 0.5)", self.inset)));
        }
        let [a, b, c, d] = umf.breakpoints();
        if self.inset == 0.0 {
            return Trapezoid::new(a, b, c, d, self.lmf_height);
        }
        let centre = 0.5 * (b + c);
        let scale = 1.0 - 2.0 * self.inset;
        let shrink = |x: f64| centre + scale * (x - centre);
        let (la, lb) = if b <= universe.lo {
            (a, b)
        } else {
            (shrink(a), shrink(b))
        };
        let (lc, ld) = if c >= universe.hi {
            (c, d)
        } else {
            (shrink(c), shrink(d))
        };
        Trapezoid::new(la, lb, lc, ld, self.lmf_height)
    }
}

/// Membership grade interval `[lo, hi]` with `0 <= lo <= hi <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiringInterval {
    lo: f64,
    hi: f64,
}

impl FiringInterval {
    pub const ZERO: FiringInterval = FiringInterval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidSet(format!(
                "firing interval [{lo}, {hi}] violates 0 <= lo <= hi <= 1"
            )));
        }
        Ok(FiringInterval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.hi == 0.0
    }

    /// Elementwise max, used to aggregate rules sharing a consequent.
    pub fn join(self, other: FiringInterval) -> FiringInterval {
        FiringInterval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Mamdani AND of two antecedent grades: elementwise minimum.
pub fn fire_rule(g1: FiringInterval, g2: FiringInterval) -> FiringInterval {
    FiringInterval {
        lo: g1.lo.min(g2.lo),
        hi: g1.hi.min(g2.hi),
    }
}

/// Interval type-2 fuzzy set given by its upper and lower membership functions.
#[derive(Debug, Clone, PartialEq)]
pub struct It2Set {
    label: String,
    umf: Trapezoid,
    lmf: Trapezoid,
    shape: Option<FouShape>,
}

impl It2Set {
    pub fn new(label: impl Into<String>, umf: Trapezoid, lmf: Trapezoid) -> Result<Self> {
        let label = label.into();
        check_containment(&label, &umf, &lmf)?;
        Ok(It2Set {
            label,
            umf,
            lmf,
            shape: None,
        })
    }

    pub fn with_shape(label: impl Into<String>, umf: Trapezoid, shape: FouShape, universe: &Universe) -> Result<Self> {
        let label = label.into();
        let lmf = shape.lower_of(&umf, universe)?;
        check_containment(&label, &umf, &lmf)?;
        Ok(It2Set {
            label,
            umf,
            lmf,
            shape: Some(shape),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn umf(&self) -> &Trapezoid {
        &self.umf
    }

    pub fn lmf(&self) -> &Trapezoid {
        &self.lmf
    }

    /// The parametric FOU this set was built from, if any.
    pub fn shape(&self) -> Option<FouShape> {
        self.shape
    }

    #[inline]
    pub fn lower(&self, x: f64) -> f64 {
        self.lmf.eval(x)
    }

    #[inline]
    pub fn upper(&self, x: f64) -> f64 {
        self.umf.eval(x)
    }

    /// `[lmf(x), umf(x)]`. Domain checking is done by the owning variable.
    pub fn grade(&self, x: f64) -> FiringInterval {
        FiringInterval {
            lo: self.lower(x),
            hi: self.upper(x),
        }
    }

    /// Same set with the lower membership function replaced by the upper one.
    pub fn to_type1(&self) -> It2Set {
        It2Set {
            label: self.label.clone(),
            umf: self.umf,
            lmf: self.umf,
            shape: self.shape.map(|_| FouShape::TYPE1),
        }
    }

    pub fn is_type1(&self) -> bool {
        self.lmf == self.umf
    }
}

fn check_containment(label: &str, umf: &Trapezoid, lmf: &Trapezoid) -> Result<()> {
    if umf.height() != 1.0 {
        return Err(Error::InvalidSet(format!(
            "`{label}`: upper membership height must be 1"
        )));
    }
    let [ua, _, _, ud] = umf.breakpoints();
    let [la, _, _, ld] = lmf.breakpoints();
    if la < ua || ld > ud {
        return Err(Error::InvalidSet(format!(
            "`{label}`: lower support [{la}, {ld}] escapes upper support [{ua}, {ud}]"
        )));
    }
    // Both functions are piecewise linear, so the breakpoints decide containment.
    for x in umf.breakpoints().into_iter().chain(lmf.breakpoints()) {
        if lmf.eval(x) > umf.eval(x) + 1e-12 {
            return Err(Error::InvalidSet(format!(
                "`{label}`: lower membership exceeds upper at x = {x}"
            )));
        }
    }
    Ok(())
}

/// Named variable with an ordered list of IT2 sets on a bounded universe.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    universe: Universe,
    sets: Vec<It2Set>,
}

impl LinguisticVariable {
    /// Checks that labels are unique, every support lies in the universe and
    /// the upper supports cover the universe without gaps.
    pub fn new(name: impl Into<String>, universe: Universe, sets: Vec<It2Set>) -> Result<Self> {
        let var = Self::new_unchecked_coverage(name, universe, sets)?;
        var.check_coverage()?;
        Ok(var)
    }

    /// Like [`LinguisticVariable::new`] but tolerates dead zones. Tuned
    /// variables go through this path.
    pub fn new_unchecked_coverage(name: impl Into<String>, universe: Universe, sets: Vec<It2Set>) -> Result<Self> {
        let name = name.into();
        if sets.is_empty() {
            return Err(Error::InvalidSet(format!("variable `{name}` has no sets")));
        }
        for (i, s) in sets.iter().enumerate() {
            if sets[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::InvalidSet(format!(
                    "variable `{name}` repeats label `{}`",
                    s.label
                )));
            }
            let [a, _, _, d] = s.umf.breakpoints();
            if a < universe.lo || d > universe.hi {
                return Err(Error::InvalidSet(format!(
                    "set `{}` of `{name}` has support [{a}, {d}] outside [{}, {}]",
                    s.label, universe.lo, universe.hi
                )));
            }
        }
        Ok(LinguisticVariable { name, universe, sets })
    }

    fn check_coverage(&self) -> Result<()> {
        let mut spans: Vec<(f64, f64)> = self
            .sets
            .iter()
            .map(|s| {
                let [a, _, _, d] = s.umf.breakpoints();
                (a, d)
            })
            .collect();
        spans.sort_by(|x, y| x.0.total_cmp(&y.0));
        let eps = 1e-12 * self.universe.width().max(1.0);
        let mut reach = self.universe.lo;
        for (a, d) in spans {
            if a > reach + eps {
                return Err(Error::InvalidSet(format!(
                    "variable `{}` has a dead zone ({reach}, {a})",
                    self.name
                )));
            }
            reach = reach.max(d);
        }
        if reach < self.universe.hi - eps {
            return Err(Error::InvalidSet(format!(
                "variable `{}` has a dead zone ({reach}, {}]",
                self.name, self.universe.hi
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn sets(&self) -> &[It2Set] {
        &self.sets
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.label == label)
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.universe.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                variable: self.name.clone(),
                value: x,
                lo: self.universe.lo,
                hi: self.universe.hi,
            })
        }
    }

    /// Membership interval of `x` in the set at `index`.
    pub fn grade(&self, index: usize, x: f64) -> Result<FiringInterval> {
        self.check_domain(x)?;
        Ok(self.sets[index].grade(x))
    }

    pub fn to_type1(&self) -> LinguisticVariable {
        LinguisticVariable {
            name: self.name.clone(),
            universe: self.universe,
            sets: self.sets.iter().map(It2Set::to_type1).collect(),
        }
    }
}

/// `[lmf(x), umf(x)]` of the set labelled `label` in `var`.
pub fn membership_interval(var: &LinguisticVariable, label: &str, x: f64) -> Result<FiringInterval> {
    let idx = var
        .index_of(label)
        .ok_or_else(|| Error::InvalidSet(format!("no set `{label}` in `{}`", var.name)))?;
    var.grade(idx, x)
}
