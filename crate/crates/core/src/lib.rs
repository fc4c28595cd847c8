//! Bishop-Phelps-Bollobás moduli of finite-dimensional real normed spaces.
//!
//! For a space `X` and `0 < delta < 2`, the modulus `Phi_X(delta)` is the
//! Hausdorff distance (in the max-metric on `X x X*`) between
//!
//! * `A_X(delta)`: pairs `(x, f)` in the unit balls with `f(x) > 1 - delta`, and
//! * `Pi(X)`: norming pairs, `||x|| = ||f|| = f(x) = 1`.
//!
//! `Phi^S_X(delta)` is the same with both elements restricted to unit spheres.
//! The crate computes the exact distance from a pair to `Pi(X)` for polytopal
//! and Euclidean spaces, searches for lower bounds on the moduli, and
//! certifies upper bounds with a Lipschitz branch-and-bound.

// Dense elimination and simplex code reads best with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod attainment;
pub mod error;
pub mod geometry;
pub mod modulus;
pub mod spaces;
pub mod squareness;

pub use error::{BpbError, Result};
