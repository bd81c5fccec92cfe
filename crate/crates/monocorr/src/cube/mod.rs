//! Exact enumeration on the discrete cube: packed truth tables, influence
//! accounting, and the deterministic family generators behind the audit
//! catalog.

mod family;
mod generate;
mod stats;

pub use family::{
    validate_dimension, BooleanFamily, CubeError, DEFAULT_DIMENSION_CAP, HARD_DIMENSION_CAP,
};
pub use generate::{
    dictator, generate, ltf, majority, random_monotone, threshold, tribes, FamilyDescriptor,
};
pub use stats::{is_nonnegative, ratio, FamilyProfile, InfluenceProfile};
