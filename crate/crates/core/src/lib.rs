//! Hierarchical interval type-2 fuzzy route assignment.
//!
//! The crate is organised bottom-up:
//!
//! * [`fuzzy`] – interval type-2 sets, single-unit Mamdani inference and
//!   Karnik–Mendel type reduction.
//! * [`hierarchy`] – wiring of fuzzy units into the preference controller and
//!   the flattened parameter vector used for tuning.
//! * [`pso`] – particle swarm tuner for the final controller's membership
//!   functions.
//! * [`network`] – road graph, shortest paths and per-junction assignment.
//! * [`sim`] – deterministic mesoscopic simulator and travel-time metrics.
//! * [`scenario`] – native scenario files, SUMO subset import, CSV outputs.
//! * [`experiment`] – strategy comparison used by the command-line driver.

pub mod error;
pub mod experiment;
pub mod fuzzy;
pub mod hierarchy;
pub mod network;
pub mod pso;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use experiment::{compare_strategies, write_comparison, ComparisonRow, Strategy};
pub use fuzzy::{
    defuzzify, fire_rule, km_type_reduce, FiringInterval, FuzzyLogicUnit, It2Set, LinguisticVariable, Trapezoid,
    Universe,
};
pub use hierarchy::{CandidateFeatures, Feature, Hierarchy, HierarchySpec, ParameterVector};
pub use network::{dijkstra_route, RoadNetwork, Route, RouteWeight};
pub use pso::{PsoConfig, Swarm};
pub use scenario::ScenarioConfig;
pub use sim::{mean_average_travel_time, RunOutput, TripRecord};
