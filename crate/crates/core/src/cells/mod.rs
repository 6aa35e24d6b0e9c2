//! The cell structure of the well-rounded retract `W`, its orbits under
//! arithmetic groups, the flag subcomplexes `W_F`, and the "small enough"
//! test.

pub mod cell;

pub use cell::{
    cell_at, cell_cofaces, cell_faces, cell_from_config, flags_respected_by, geometry,
    respects_flag, shoot, spanned_subspaces, Cell, CellGeometry, LocalCell,
};
pub mod atlas;

pub use atlas::{atlas, root_form, Atlas, CellClass, FaceLink};
pub mod complex;

pub use complex::{
    enumerate_W, enumerate_with, subcomplex_WF, Constraint, Decoration, DecorationIndex,
    EnumerationOptions, GroupContext, Incidence, OrbitCell, OrbitComplex,
};
pub mod small;

pub use small::{is_small_enough, is_small_enough_with, SmallnessReport, SmallnessWitness};
