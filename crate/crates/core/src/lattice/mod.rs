//! Quadratic forms as points of the symmetric space, short-vector
//! enumeration, minimal vectors, well-roundedness, and equivalence of vector
//! configurations under arithmetic groups.

pub mod config;
pub mod enumerate;
pub mod equiv;
pub mod form;
pub mod group;

pub use config::VectorConfig;
pub use enumerate::{
    is_well_rounded, min_sq, minimal_vectors, normalize, values_below, vectors_below,
    vectors_below_raw, MinimaResult,
};
pub use equiv::{config_equiv, config_key, config_stabilizer, ConfigKey, Stabilizer};
pub use form::GramForm;
pub use group::{CosetSpace, Family, GroupSpec};
