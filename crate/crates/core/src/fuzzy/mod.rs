//! Interval type-2 fuzzy sets and single-unit Mamdani inference.

mod km;
mod set;
mod unit;

pub use km::{defuzzify, km_reduce, km_type_reduce};
pub use set::{
    fire_rule, membership_interval, FiringInterval, FouShape, It2Set, LinguisticVariable, Trapezoid, Universe,
};
pub use unit::{FuzzyLogicUnit, DEFAULT_RESOLUTION};
