//! Origin-symmetric polytopes in vertex form and their facets.

use crate::error::{check_dim, BpbError, Result};
use crate::geometry::vector::{dot, max_abs_diff, rank, solve_square, Functional, Vector};

/// Incidence tolerance: `n.v = 1` within this counts as "on the facet".
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Relative pivot tolerance for rank and singularity decisions.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Two facet normals closer than this (max-abs) are the same facet.
pub const NORMAL_MERGE_TOL: f64 = 1e-7;
/// Largest ambient dimension the brute-force hull supports.
pub const MAX_DIM: usize = 4;

/// A supporting hyperplane `{x : normal.x = 1}` of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Functional,
    /// Indices of the polytope vertices lying on the facet, ascending.
    pub vertex_indices: Vec<usize>,
}

/// The convex hull of a vertex set closed under `v -> -v`, containing the
/// origin in its interior, with no redundant vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolytope {
    dim: usize,
    vertices: Vec<Vector>,
}

impl SymmetricPolytope {
    /// Validates an explicit vertex list.
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let dim = common_dim(&vertices)?;
        for (i, v) in vertices.iter().enumerate() {
            for w in &vertices[..i] {
                if max_abs_diff(v, w) <= INCIDENCE_TOL {
                    return Err(BpbError::DegeneratePolytope(format!("duplicate vertex {v:?}")));
                }
            }
            if !vertices.iter().any(|w| max_abs_diff(&v.neg(), w) <= INCIDENCE_TOL) {
                return Err(BpbError::DegeneratePolytope(format!(
                    "vertex set not symmetric: {v:?} has no antipode"
                )));
            }
        }
        let rows: Vec<&[f64]> = vertices.iter().map(|v| v.coords()).collect();
        if rank(&rows, DEGENERACY_TOL) < dim {
            return Err(BpbError::DegeneratePolytope("vertices do not span the space".into()));
        }
        let facets = facets_of_points(dim, &vertices)?;
        if let Some(v) = vertices.iter().enumerate().find_map(|(i, v)| {
            (!is_extreme(dim, i, &facets)).then_some(v)
        }) {
            return Err(BpbError::DegeneratePolytope(format!("redundant vertex {v:?}")));
        }
        Ok(Self { dim, vertices })
    }

    /// The absolute convex hull of `points`: adds antipodes, drops duplicates
    /// and interior points.
    pub fn absolute_hull(points: &[Vector]) -> Result<Self> {
        let dim = common_dim(points)?;
        let mut all: Vec<Vector> = Vec::with_capacity(2 * points.len());
        for p in points.iter().flat_map(|p| [p.clone(), p.neg()]) {
            if p.iter().all(|c| c.abs() <= INCIDENCE_TOL) {
                continue;
            }
            if !all.iter().any(|q| max_abs_diff(q, &p) <= INCIDENCE_TOL) {
                all.push(p);
            }
        }
        let rows: Vec<&[f64]> = all.iter().map(|v| v.coords()).collect();
        if rank(&rows, DEGENERACY_TOL) < dim {
            return Err(BpbError::DegeneratePolytope("points do not span the space".into()));
        }
        let facets = facets_of_points(dim, &all)?;
        let kept = (0..all.len())
            .filter(|&i| is_extreme(dim, i, &facets))
            .map(|i| all[i].clone())
            .collect();
        Self::new(kept)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> Result<Vec<Facet>> {
        hull_facets(self)
    }

    pub fn polar(&self) -> Result<SymmetricPolytope> {
        polar(self)
    }

    /// Whether `other` has the same vertex set up to order, within `tol`.
    pub fn same_vertex_set(&self, other: &SymmetricPolytope, tol: f64) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .all(|v| other.vertices.iter().any(|w| max_abs_diff(v, w) <= tol))
    }

    /// Gauge (Minkowski functional) evaluated through a facet list.
    pub fn gauge_from_facets(facets: &[Facet], x: &[f64]) -> f64 {
        facets.iter().map(|f| dot(&f.normal, x)).fold(0.0, f64::max)
    }
}

/// Enumerates the facets of `p` by brute force over `dim`-subsets of
/// vertices: each subset spanning a hyperplane off the origin that leaves all
/// vertices on one side supports a facet. Coplanar clusters are merged.
pub fn hull_facets(p: &SymmetricPolytope) -> Result<Vec<Facet>> {
    facets_of_points(p.dim, &p.vertices)
}

/// The polar polytope; its vertices are the facet normals of `p`, in facet order.
pub fn polar(p: &SymmetricPolytope) -> Result<SymmetricPolytope> {
    let facets = hull_facets(p)?;
    SymmetricPolytope::new(facets.into_iter().map(|f| f.normal.as_vector()).collect())
}

fn common_dim(points: &[Vector]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| BpbError::DegeneratePolytope("empty vertex list".into()))?;
    let dim = first.dim();
    for p in points {
        check_dim(dim, p.dim())?;
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(BpbError::BadParameter(format!(
            "polytope dimension {dim} outside 1..={MAX_DIM}"
        )));
    }
    Ok(dim)
}

fn is_extreme(dim: usize, vertex: usize, facets: &[Facet]) -> bool {
    let normals: Vec<&[f64]> = facets
        .iter()
        .filter(|f| f.vertex_indices.binary_search(&vertex).is_ok())
        .map(|f| f.normal.coords())
        .collect();
    rank(&normals, DEGENERACY_TOL) == dim
}

pub(crate) fn facets_of_points(dim: usize, points: &[Vector]) -> Result<Vec<Facet>> {
    let mut facets: Vec<Facet> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    if points.len() < dim {
        return Err(BpbError::DegeneratePolytope("fewer vertices than dimensions".into()));
    }
    loop {
        let rows: Vec<Vec<f64>> = subset.iter().map(|&i| points[i].to_vec()).collect();
        if let Some(normal) = solve_square(&rows, &vec![1.0; dim], DEGENERACY_TOL) {
            let supports = points.iter().all(|w| dot(&normal, w) <= 1.0 + INCIDENCE_TOL);
            let known = facets.iter().any(|f| max_abs_diff(&f.normal, &normal) <= NORMAL_MERGE_TOL);
            if supports && !known {
                let vertex_indices = points
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| (dot(&normal, w) - 1.0).abs() <= INCIDENCE_TOL)
                    .map(|(i, _)| i)
                    .collect();
                facets.push(Facet { normal: Functional::from(normal), vertex_indices });
            }
        }
        if !next_combination(&mut subset, points.len()) {
            break;
        }
    }
    if facets.is_empty() {
        return Err(BpbError::DegeneratePolytope("no facets found".into()));
    }
    Ok(facets)
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(points: &[&[f64]]) -> SymmetricPolytope {
        SymmetricPolytope::new(points.iter().map(|p| Vector::from(*p)).collect()).unwrap()
    }

    fn normals(facets: &[Facet]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = facets.iter().map(|f| f.normal.to_vec()).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn square_facets_are_axis_normals() {
        let sq = poly(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        let f = hull_facets(&sq).unwrap();
        assert_eq!(f.len(), 4);
        let n = normals(&f);
        let expected = vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        for (a, b) in n.iter().zip(&expected) {
            assert!(max_abs_diff(a, b) < 1e-12, "{a:?} vs {b:?}");
        }
        for facet in &f {
            assert_eq!(facet.vertex_indices.len(), 2);
        }
    }

    #[test]
    fn cross_polytope_facets_are_diagonal_normals() {
        let cp = poly(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let n = normals(&hull_facets(&cp).unwrap());
        assert_eq!(n.len(), 4);
        for v in n {
            assert!((v[0].abs() - 1.0).abs() < 1e-12 && (v[1].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_redundant_and_flat() {
        let asym = vec![Vector::from(vec![1.0, 0.0]), Vector::from(vec![0.0, 1.0])];
        assert!(matches!(SymmetricPolytope::new(asym), Err(BpbError::DegeneratePolytope(_))));
        let flat: Vec<Vector> =
            [[1.0, 1.0], [-1.0, -1.0]].iter().map(|p| Vector::from(p.to_vec())).collect();
        assert!(matches!(SymmetricPolytope::new(flat), Err(BpbError::DegeneratePolytope(_))));
        let redundant: Vec<Vector> = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.2, 0.2], [-0.2, -0.2]]
            .iter()
            .map(|p| Vector::from(p.to_vec()))
            .collect();
        assert!(matches!(SymmetricPolytope::new(redundant.clone()), Err(BpbError::DegeneratePolytope(_))));
        let cleaned = SymmetricPolytope::absolute_hull(&redundant).unwrap();
        assert_eq!(cleaned.vertices().len(), 4);
    }

    #[test]
    fn absolute_hull_adds_antipodes() {
        let p = SymmetricPolytope::absolute_hull(&[Vector::from(vec![1.0, 0.0]), Vector::from(vec![0.0, 1.0])])
            .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn square_polar_is_cross_polytope() {
        let sq = poly(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        let cp = poly(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert!(polar(&sq).unwrap().same_vertex_set(&cp, 1e-12));
        assert!(polar(&cp).unwrap().same_vertex_set(&sq, 1e-12));
    }

    #[test]
    fn one_dimensional_segment() {
        let seg = poly(&[&[1.0], &[-1.0]]);
        let f = hull_facets(&seg).unwrap();
        assert_eq!(f.len(), 2);
        assert!(polar(&seg).unwrap().same_vertex_set(&seg, 1e-12));
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }
}
