//! Distances in a polyhedral norm, computed as small linear programs.
//!
//! For a face `E = conv{v_1..v_k}` and a norm with unit ball
//! `B = conv{w_1..w_N}`,
//!
//! ```text
//! dist(x, E) = min sum(nu)  s.t.  sum(lambda_j v_j) + sum(nu_l w_l) = x,
//!                                 sum(lambda) = 1,  lambda, nu >= 0
//! ```
//!
//! since `x - y` lies in `t B` exactly when it is a nonnegative combination
//! of the `w_l` with total weight `t`. The program has `dim + 1` rows.

use crate::error::{check_dim, BpbError, Result};
use crate::geometry::lp::solve_standard;
use crate::geometry::polytope::SymmetricPolytope;
use crate::geometry::vector::Vector;

/// Pre-assembled constraint matrix for repeated distance queries to one
/// convex hull under one polyhedral norm.
#[derive(Debug, Clone)]
pub struct HullDistance {
    dim: usize,
    hull_len: usize,
    columns: usize,
    matrix: Vec<f64>,
    cost: Vec<f64>,
    hull: Vec<f64>,
}

impl HullDistance {
    /// `hull` holds the vertices of the target set; `ball` the vertices of
    /// the norm's unit ball. Both flattened row-major with `dim` columns.
    pub fn new(dim: usize, hull: &[f64], ball: &[f64]) -> Self {
        let hull_len = hull.len() / dim;
        let ball_len = ball.len() / dim;
        let columns = hull_len + ball_len;
        let rows = dim + 1;
        let mut matrix = vec![0.0; rows * columns];
        for i in 0..dim {
            for j in 0..hull_len {
                matrix[i * columns + j] = hull[j * dim + i];
            }
            for l in 0..ball_len {
                matrix[i * columns + hull_len + l] = ball[l * dim + i];
            }
        }
        for j in 0..hull_len {
            matrix[dim * columns + j] = 1.0;
        }
        let mut cost = vec![0.0; columns];
        for c in cost.iter_mut().skip(hull_len) {
            *c = 1.0;
        }
        Self { dim, hull_len, columns, matrix, cost, hull: hull.to_vec() }
    }

    /// Distance from `x` to the hull and a nearest point.
    pub fn solve(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut b = x.to_vec();
        b.push(1.0);
        let sol = solve_standard(&self.matrix, self.dim + 1, self.columns, &b, &self.cost)?;
        let mut y = vec![0.0; self.dim];
        let weight: f64 = sol.z[..self.hull_len].iter().sum();
        for (j, lam) in sol.z[..self.hull_len].iter().enumerate() {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += lam / weight * self.hull[j * self.dim + i];
            }
        }
        Ok((sol.objective.max(0.0), y))
    }

    pub fn hull_len(&self) -> usize {
        self.hull_len
    }
}

/// `min_{y in conv(face)} ||x - y||` where `||.||` is the gauge of `norm_ball`.
pub fn dist_to_face(x: &Vector, face: &[Vector], norm_ball: &SymmetricPolytope) -> Result<f64> {
    nearest_in_face(x, face, norm_ball).map(|(d, _)| d)
}

/// As [`dist_to_face`], also returning a nearest point of the face.
pub fn nearest_in_face(x: &Vector, face: &[Vector], norm_ball: &SymmetricPolytope) -> Result<(f64, Vector)> {
    let dim = norm_ball.dim();
    check_dim(dim, x.dim())?;
    if face.is_empty() {
        return Err(BpbError::BadParameter("empty face".into()));
    }
    for v in face {
        check_dim(dim, v.dim())?;
    }
    let hull: Vec<f64> = face.iter().flat_map(|v| v.iter().copied()).collect();
    let ball: Vec<f64> = norm_ball.vertices().iter().flat_map(|v| v.iter().copied()).collect();
    let (d, y) = HullDistance::new(dim, &hull, &ball).solve(x)?;
    Ok((d, Vector::from(y)))
}

/// Gauge of `ball` at `x` through the vertex description alone (the
/// distance from `x` to the origin). Independent of facet enumeration.
pub fn gauge_by_lp(x: &Vector, ball: &SymmetricPolytope) -> Result<f64> {
    dist_to_face(x, &[Vector::zeros(ball.dim())], ball)
}
