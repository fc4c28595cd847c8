//! Proper faces of a polytope and their conjugates in the polar.
//!
//! A proper face `E` of `P` is an intersection of facets. Its conjugate is
//! the face of `polar(P)` spanned by the normals of the facets containing
//! `E`; those are exactly the functionals of dual norm one that equal one on
//! all of `E`. Conjugation reverses inclusion and maps `k`-faces to
//! `(dim - 1 - k)`-faces.

use std::collections::HashMap;

use crate::error::{BpbError, Result};
use crate::geometry::polytope::{Facet, SymmetricPolytope, DEGENERACY_TOL};
use crate::geometry::vector::rank;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    /// Vertex indices of the polytope, ascending.
    pub vertices: Vec<usize>,
    /// Indices of the facets containing this face, ascending. Facet `i` is
    /// vertex `i` of the polar.
    pub facets: Vec<usize>,
    /// Id of the conjugate face in the polar lattice.
    pub conjugate: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    faces: Vec<Face>,
}

impl FaceLattice {
    /// Builds the lattices of `primal` and of its polar together and links
    /// each face to its conjugate. `polar` must list its vertices in the
    /// order of `primal_facets`, as [`crate::geometry::polar`] does.
    pub fn build_pair(
        primal: &SymmetricPolytope,
        primal_facets: &[Facet],
        polar: &SymmetricPolytope,
        polar_facets: &[Facet],
    ) -> Result<(FaceLattice, FaceLattice)> {
        if polar.vertices().len() != primal_facets.len() {
            return Err(BpbError::DegeneratePolytope(
                "polar vertex count differs from facet count".into(),
            ));
        }
        let mut p = enumerate_faces(primal, primal_facets);
        let mut q = enumerate_faces(polar, polar_facets);
        let q_index: HashMap<&[usize], usize> =
            q.iter().enumerate().map(|(i, f)| (f.vertices.as_slice(), i)).collect();
        let mut links = Vec::with_capacity(p.len());
        for face in &p {
            let id = *q_index.get(face.facets.as_slice()).ok_or_else(|| {
                BpbError::DegeneratePolytope(format!("no conjugate for face {:?}", face.vertices))
            })?;
            links.push(id);
        }
        if p.len() != q.len() {
            return Err(BpbError::DegeneratePolytope("face counts of polytope and polar differ".into()));
        }
        for (i, &j) in links.iter().enumerate() {
            p[i].conjugate = j;
            q[j].conjugate = i;
        }
        Ok((FaceLattice { faces: p }, FaceLattice { faces: q }))
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> Result<&Face> {
        self.faces.get(id).ok_or(BpbError::InvalidFace(id))
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Faces of a given dimension, in lattice order.
    pub fn faces_of_dim(&self, dim: usize) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(move |(_, f)| f.dim == dim)
    }

    /// Id of the face with exactly this vertex set.
    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        self.faces.iter().position(|f| f.vertices == vertices)
    }
}

/// Id of the conjugate of `face_id` in the polar lattice.
pub fn face_conjugate(lattice: &FaceLattice, face_id: usize) -> Result<usize> {
    Ok(lattice.face(face_id)?.conjugate)
}

fn enumerate_faces(p: &SymmetricPolytope, facets: &[Facet]) -> Vec<Face> {
    let mut sets: Vec<Vec<usize>> = facets.iter().map(|f| f.vertex_indices.clone()).collect();
    let mut seen: std::collections::HashSet<Vec<usize>> = sets.iter().cloned().collect();
    let mut i = 0;
    while i < sets.len() {
        for f in facets {
            let meet: Vec<usize> = sets[i]
                .iter()
                .copied()
                .filter(|v| f.vertex_indices.binary_search(v).is_ok())
                .collect();
            if !meet.is_empty() && seen.insert(meet.clone()) {
                sets.push(meet);
            }
        }
        i += 1;
    }
    // Stable presentation: vertices first, then by dimension and vertex list.
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|vertices| {
            let facets_in: Vec<usize> = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| vertices.iter().all(|v| f.vertex_indices.binary_search(v).is_ok()))
                .map(|(j, _)| j)
                .collect();
            Face { dim: affine_dim(p, &vertices), vertices, facets: facets_in, conjugate: usize::MAX }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
    faces
}

fn affine_dim(p: &SymmetricPolytope, vertices: &[usize]) -> usize {
    let verts = p.vertices();
    let base = &verts[vertices[0]];
    let diffs: Vec<Vec<f64>> = vertices[1..].iter().map(|&i| verts[i].sub(base).into_coords()).collect();
    let rows: Vec<&[f64]> = diffs.iter().map(|d| d.as_slice()).collect();
    rank(&rows, DEGENERACY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::{hull_facets, polar};
    use crate::geometry::vector::{dot, Vector};

    fn square() -> SymmetricPolytope {
        SymmetricPolytope::new(
            [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
                .iter()
                .map(|p| Vector::from(p.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn lattices(p: &SymmetricPolytope) -> (SymmetricPolytope, FaceLattice, FaceLattice) {
        let f = hull_facets(p).unwrap();
        let q = polar(p).unwrap();
        let qf = hull_facets(&q).unwrap();
        let (a, b) = FaceLattice::build_pair(p, &f, &q, &qf).unwrap();
        (q, a, b)
    }

    #[test]
    fn square_lattice_counts() {
        let (_, l, pl) = lattices(&square());
        assert_eq!(l.faces_of_dim(0).count(), 4);
        assert_eq!(l.faces_of_dim(1).count(), 4);
        assert_eq!(pl.len(), 8);
    }

    #[test]
    fn square_facet_conjugates_to_polar_vertex() {
        let sq = square();
        let (q, l, pl) = lattices(&sq);
        // facet through (1,1) and (1,-1)
        let id = l.find(&[0, 1]).unwrap();
        let conj = pl.face(face_conjugate(&l, id).unwrap()).unwrap();
        assert_eq!(conj.dim, 0);
        let v = &q.vertices()[conj.vertices[0]];
        assert!(v.max_abs_diff(&Vector::from(vec![1.0, 0.0])) < 1e-12);
        // vertex (1,1) goes to the polar edge conv{(1,0),(0,1)}
        let vid = l.find(&[0]).unwrap();
        let edge = pl.face(face_conjugate(&l, vid).unwrap()).unwrap();
        assert_eq!(edge.dim, 1);
        for &j in &edge.vertices {
            assert!((dot(&q.vertices()[j], &sq.vertices()[0]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_is_an_antitone_involution() {
        let (_, l, pl) = lattices(&square());
        for (i, f) in l.faces().iter().enumerate() {
            let g = pl.face(f.conjugate).unwrap();
            assert_eq!(g.conjugate, i);
            assert_eq!(f.dim + g.dim, 1);
        }
    }

    #[test]
    fn invalid_face_id() {
        let (_, l, _) = lattices(&square());
        assert_eq!(face_conjugate(&l, 99), Err(BpbError::InvalidFace(99)));
    }
}
