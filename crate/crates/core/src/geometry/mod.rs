//! Small-dimension geometry of origin-symmetric polytopes: facets, polar,
//! face lattice with conjugation, and polyhedral distances.

mod ball;
mod distance;
mod lattice;
pub mod lp;
mod polytope;
mod vector;

pub use ball::PolytopalBall;
pub use distance::{dist_to_face, gauge_by_lp, nearest_in_face, HullDistance};
pub use lattice::{face_conjugate, Face, FaceLattice};
pub use polytope::{
    hull_facets, polar, Facet, SymmetricPolytope, DEGENERACY_TOL, INCIDENCE_TOL, MAX_DIM, NORMAL_MERGE_TOL,
};
pub use vector::{dot, pairing, Functional, Vector};
