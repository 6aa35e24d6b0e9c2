//! Well-rounded retracts of arithmetic groups in exact arithmetic.
//!
//! Points of the symmetric space of `GL_n(R)` modulo homothety are stored as
//! rational positive-definite Gram matrices. The crate computes
//!
//! * minimal vectors and the well-rounded retraction of a form
//!   ([`lattice`], [`retraction`]),
//! * rational flags, their orbits under congruence subgroups, and parabolic
//!   membership ([`flags`]),
//! * the cell structure of the well-rounded retract `W` and its flag
//!   subcomplexes `W_F` modulo a group ([`cells`]),
//! * finite Δ-complex models of `W/Γ` and `W_F/(Γ∩P)` with (co)homology over
//!   Z, Q and F_p ([`quotient`]),
//! * the Čech-type double complex built from the `W_F`, its spectral
//!   sequence, boundary cohomology, and the restriction from `H^*(W/Γ)`
//!   ([`boundary`]).
//!
//! Everything is exact: rationals, big integers, and an exact simplex solver.
//!
//! ```
//! use wellround::lattice::{minimal_vectors, GramForm};
//! let a = GramForm::from_ints(&[&[2, 1], &[1, 2]]).unwrap();
//! let m = minimal_vectors(&a).unwrap();
//! assert_eq!(m.vectors.len(), 3); // the hexagonal lattice
//! ```

pub mod boundary;
pub mod cells;
pub mod error;
pub mod exactla;
pub mod flags;
pub mod lattice;
pub mod quotient;
pub mod retraction;

pub use error::{Error, Result};

/// Book chapters compiled as doc-tests so the guide never drifts from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/retraction.md")]
    mod retraction {}
    #[doc = include_str!("../../../book/src/flags.md")]
    mod flags {}
    #[doc = include_str!("../../../book/src/cells.md")]
    mod cells {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    mod quotients {}
    #[doc = include_str!("../../../book/src/boundary.md")]
    mod boundary {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
