//! Boundary cohomology of `W/Γ` through the flag subcomplexes `W_F`: the
//! Čech-type double complex, its spectral sequence, the total cohomology,
//! the restriction from `H^*(W/Γ)` and the interior part, the homology dual,
//! and single-face maps.

pub mod double;
pub mod restriction;
pub mod spectral;

pub use double::{
    build_double_complex, from_enumeration, DoubleComplex, HorizontalLink, Summand, SummandSummary,
};
pub use restriction::{
    boundary_homology, boundary_homology_of, face_map, psi, restriction, restriction_of,
    BoundaryHomologyReport, FaceMapReport, InclusionDegree, RestrictionDegree, RestrictionReport,
};
pub use spectral::{
    e1_page, spectral_sequence, total_cohomology, total_euler_characteristic, PageDifferential,
    SpectralPage, SpectralSequence,
};
