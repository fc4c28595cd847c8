//! A polytopal unit ball with everything the norm queries need, computed once.

use crate::error::Result;
use crate::geometry::lattice::FaceLattice;
use crate::geometry::polytope::{hull_facets, polar, Facet, SymmetricPolytope};
use crate::geometry::vector::dot;

/// Unit ball `B_X` together with its facets, its polar `B_X*`, and the two
/// face lattices linked by conjugation.
#[derive(Debug, Clone)]
pub struct PolytopalBall {
    polytope: SymmetricPolytope,
    facets: Vec<Facet>,
    polar: SymmetricPolytope,
    polar_facets: Vec<Facet>,
    lattice: FaceLattice,
    polar_lattice: FaceLattice,
}

impl PolytopalBall {
    pub fn new(polytope: SymmetricPolytope) -> Result<Self> {
        let facets = hull_facets(&polytope)?;
        let polar = polar(&polytope)?;
        let polar_facets = hull_facets(&polar)?;
        let (lattice, polar_lattice) = FaceLattice::build_pair(&polytope, &facets, &polar, &polar_facets)?;
        Ok(Self { polytope, facets, polar, polar_facets, lattice, polar_lattice })
    }

    /// The ball of the dual norm.
    pub fn dual(&self) -> Result<Self> {
        Self::new(self.polar.clone())
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn polytope(&self) -> &SymmetricPolytope {
        &self.polytope
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn polar(&self) -> &SymmetricPolytope {
        &self.polar
    }

    pub fn polar_facets(&self) -> &[Facet] {
        &self.polar_facets
    }

    pub fn lattice(&self) -> &FaceLattice {
        &self.lattice
    }

    pub fn polar_lattice(&self) -> &FaceLattice {
        &self.polar_lattice
    }

    /// `||x|| = max_F n_F . x`.
    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| dot(&f.normal, x)).fold(0.0, f64::max)
    }

    /// `||f||* = max_v f . v` over the vertices.
    #[inline]
    pub fn dual_norm(&self, f: &[f64]) -> f64 {
        self.polytope.vertices().iter().map(|v| dot(f, v)).fold(0.0, f64::max)
    }

    /// Index of the first facet attaining the norm of `x`.
    pub fn maximizing_facet(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, f) in self.facets.iter().enumerate() {
            let v = dot(&f.normal, x);
            if v > best.1 {
                best = (i, v);
            }
        }
        best.0
    }

    /// Largest norm over the box `center +- half_widths` and the smallest
    /// guaranteed lower bound of the norm on it.
    pub fn norm_range_on_box(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64) {
        range_on_box(self.facets.iter().map(|f| f.normal.coords()), center, half_widths)
    }

    /// As [`Self::norm_range_on_box`] for the dual norm.
    pub fn dual_norm_range_on_box(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64) {
        range_on_box(self.polytope.vertices().iter().map(|v| v.coords()), center, half_widths)
    }
}

/// For `g(x) = max_i <a_i, x>` on a box: returns `(lower, upper)` with
/// `lower <= min g` and `upper = max g` exactly.
fn range_on_box<'a>(
    normals: impl Iterator<Item = &'a [f64]>,
    center: &[f64],
    half_widths: &[f64],
) -> (f64, f64) {
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    for n in normals {
        let c = dot(n, center);
        let spread: f64 = n.iter().zip(half_widths).map(|(a, w)| a.abs() * w).sum();
        lo = lo.max(c - spread);
        hi = hi.max(c + spread);
    }
    (lo, hi)
}
