//! Serializable description of a controller hierarchy and its defaults.
//!
//! Default wiring (five units over six leaf features):
//!
//! ```text
//! density ──┐                familiarity ─┐             departure_time ─┐
//! max_speed ┴─ Path ─┐       usual_speed ─┴─ Driver ─┐  weather ────────┴─ Environment ─┐
//!                    └──────────── PD ───────────────┘                                  │
//!                                   └────────────────────────── PDE ────────────────────┘
//! ```
//!
//! `Path` uses the published path-preference rule base. `Driver` and
//! `Environment` use a monotone table over the favourability rank (0..2) of
//! each label: a rank sum of 3 or more gives `Strong`, 1 or less gives `Weak`,
//! anything else `Medium`. `PD` and `PDE` weight their first (path-side) input
//! twice: the output rank is `(2 r1 + r2 + 1) / 3` in integer arithmetic.

use serde::{Deserialize, Serialize};

use super::Feature;

/// Where a unit input takes its value from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Feature(Feature),
    Unit(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    pub label: String,
    /// Upper membership breakpoints `[a, b, c, d]`.
    pub umf: [f64; 4],
    pub lmf_height: f64,
    pub inset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub universe: [f64; 2],
    pub sets: Vec<SetSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub source: InputSource,
    pub variable: VariableSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub when: [String; 2],
    pub then: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSpec {
    pub name: String,
    pub inputs: [InputSpec; 2],
    pub output: VariableSpec,
    pub rules: Vec<RuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

/// Units, their wiring and the name of the root unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub units: Vec<UnitSpec>,
    pub root: String,
}

pub const DEFAULT_LMF_HEIGHT: f64 = 0.9;
pub const DEFAULT_INSET: f64 = 0.1;
pub const PREFERENCE_LABELS: [&str; 3] = ["Weak", "Medium", "Strong"];

/// Three sets at the thirds of `[lo, hi]`, in ascending order of position.
pub fn thirds(name: &str, lo: f64, hi: f64, labels: [&str; 3]) -> VariableSpec {
    let w = hi - lo;
    let at = |f: f64| lo + f * w;
    let shapes = [
        [lo, lo, at(0.25), at(0.45)],
        [at(0.25), at(0.45), at(0.55), at(0.75)],
        [at(0.55), at(0.75), hi, hi],
    ];
    VariableSpec {
        name: name.to_string(),
        universe: [lo, hi],
        sets: labels
            .iter()
            .zip(shapes)
            .map(|(l, umf)| SetSpec {
                label: l.to_string(),
                umf,
                lmf_height: DEFAULT_LMF_HEIGHT,
                inset: DEFAULT_INSET,
            })
            .collect(),
    }
}

/// Upper end of the default density universe. Junction routing feeds each
/// candidate's density divided by the largest density among the candidates.
pub const DENSITY_MAX: f64 = 1.0;

pub fn density_variable() -> VariableSpec {
    thirds("density", 0.0, DENSITY_MAX, ["Free", "Synchronized", "Jam"])
}

pub fn max_speed_variable() -> VariableSpec {
    // Low allowed speed reads as Jam, high as Free.
    thirds("max_speed_norm", 0.0, 1.0, ["Jam", "Synchronized", "Free"])
}

pub fn preference_variable(name: &str) -> VariableSpec {
    thirds(name, 0.0, 1.0, PREFERENCE_LABELS)
}

/// Path-preference rule base: density label, maximum-speed label, output.
pub const PATH_RULES: [(&str, &str, &str); 9] = [
    ("Synchronized", "Free", "Medium"),
    ("Synchronized", "Synchronized", "Weak"),
    ("Synchronized", "Jam", "Weak"),
    ("Free", "Synchronized", "Strong"),
    ("Free", "Jam", "Medium"),
    ("Jam", "Synchronized", "Weak"),
    ("Jam", "Free", "Weak"),
    ("Jam", "Jam", "Weak"),
    ("Free", "Free", "Strong"),
];

fn rule(a: &str, b: &str, out: &str) -> RuleSpec {
    RuleSpec {
        when: [a.to_string(), b.to_string()],
        then: out.to_string(),
    }
}

/// Monotone table from per-label favourability ranks (0 worst .. 2 best).
pub fn monotone_rules(first: [(&str, u8); 3], second: [(&str, u8); 3]) -> Vec<RuleSpec> {
    let mut rules = Vec::with_capacity(9);
    for (a, ra) in first {
        for (b, rb) in second {
            let out = match ra + rb {
                0 | 1 => "Weak",
                2 => "Medium",
                _ => "Strong",
            };
            rules.push(rule(a, b, out));
        }
    }
    rules
}

/// Monotone table where the first input counts double.
pub fn weighted_rules(first: [(&str, u8); 3], second: [(&str, u8); 3]) -> Vec<RuleSpec> {
    let mut rules = Vec::with_capacity(9);
    for (a, ra) in first {
        for (b, rb) in second {
            let out = PREFERENCE_LABELS[usize::from((2 * ra + rb + 1) / 3)];
            rules.push(rule(a, b, out));
        }
    }
    rules
}

const PREF_RANKS: [(&str, u8); 3] = [("Weak", 0), ("Medium", 1), ("Strong", 2)];

fn unit(name: &str, a: (InputSource, VariableSpec), b: (InputSource, VariableSpec), rules: Vec<RuleSpec>) -> UnitSpec {
    UnitSpec {
        name: name.to_string(),
        inputs: [
            InputSpec {
                source: a.0,
                variable: a.1,
            },
            InputSpec {
                source: b.0,
                variable: b.1,
            },
        ],
        output: preference_variable(&format!("{}_pref", name.to_lowercase())),
        rules,
        resolution: None,
    }
}

impl Default for HierarchySpec {
    fn default() -> Self {
        let path = unit(
            "Path",
            (InputSource::Feature(Feature::Density), density_variable()),
            (InputSource::Feature(Feature::MaxSpeedNorm), max_speed_variable()),
            PATH_RULES.iter().map(|&(a, b, o)| rule(a, b, o)).collect(),
        );
        let driver = unit(
            "Driver",
            (
                InputSource::Feature(Feature::Familiarity),
                thirds("familiarity", 0.0, 1.0, ["Low", "Medium", "High"]),
            ),
            (
                InputSource::Feature(Feature::UsualSpeed),
                thirds("usual_speed", 0.0, 40.0, ["Slow", "Moderate", "Fast"]),
            ),
            monotone_rules(
                [("Low", 0), ("Medium", 1), ("High", 2)],
                [("Slow", 0), ("Moderate", 1), ("Fast", 2)],
            ),
        );
        let environment = unit(
            "Environment",
            (
                InputSource::Feature(Feature::DepartureTime),
                thirds("departure_time", 0.0, 24.0, ["Night", "Day", "Evening"]),
            ),
            (
                InputSource::Feature(Feature::Weather),
                thirds("weather", 0.0, 1.0, ["Clear", "Moderate", "Severe"]),
            ),
            monotone_rules(
                [("Night", 2), ("Day", 1), ("Evening", 0)],
                [("Clear", 2), ("Moderate", 1), ("Severe", 0)],
            ),
        );
        let pd = unit(
            "PD",
            (InputSource::Unit("Path".into()), preference_variable("path_pref")),
            (InputSource::Unit("Driver".into()), preference_variable("driver_pref")),
            weighted_rules(PREF_RANKS, PREF_RANKS),
        );
        let pde = unit(
            "PDE",
            (InputSource::Unit("PD".into()), preference_variable("pd_pref")),
            (
                InputSource::Unit("Environment".into()),
                preference_variable("environment_pref"),
            ),
            weighted_rules(PREF_RANKS, PREF_RANKS),
        );
        HierarchySpec {
            units: vec![path, driver, environment, pd, pde],
            root: "PDE".into(),
        }
    }
}
