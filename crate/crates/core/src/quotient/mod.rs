//! Finite Δ-complex models of `W/Γ` and `W_F/(Γ∩P)`, their (co)homology
//! over Z, Q and F_p, and the chain maps induced by inclusions.

pub mod chain_map;
pub mod complex;
pub mod homology;

pub use chain_map::{induced_map, ChainMap, InducedMap};
pub use complex::{barycentric_quotient, QuotientComplex, SimplexKey, SimplexLabel};
pub use homology::{Coefficients, DegreeGroup, GradedComplex, HomologyResult, ReportField};
