//! Coordinate vectors of a space and of its dual.
//!
//! Both sides of a duality live in `R^n`; the action of a functional on a
//! vector is the standard inner product. Keeping the two as separate types
//! stops a functional from being measured with the primal norm by accident.

use std::fmt;
use std::ops::{Deref, Index};

use crate::error::{BpbError, Result};

macro_rules! coordinate_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Default)]
        pub struct $name {
            coords: Vec<f64>,
        }

        impl $name {
            /// Builds from coordinates, rejecting NaN and infinities.
            pub fn new(coords: Vec<f64>) -> Result<Self> {
                if coords.is_empty() {
                    return Err(BpbError::BadParameter("empty coordinate list".into()));
                }
                if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
                    return Err(BpbError::BadParameter(format!("non-finite coordinate {bad}")));
                }
                Ok(Self { coords })
            }

            pub fn zeros(dim: usize) -> Self {
                Self { coords: vec![0.0; dim] }
            }

            /// The `i`-th standard basis vector.
            pub fn basis(dim: usize, i: usize) -> Self {
                let mut coords = vec![0.0; dim];
                coords[i] = 1.0;
                Self { coords }
            }

            pub fn dim(&self) -> usize {
                self.coords.len()
            }

            pub fn coords(&self) -> &[f64] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.coords
            }

            pub fn scaled(&self, s: f64) -> Self {
                Self { coords: self.coords.iter().map(|c| c * s).collect() }
            }

            pub fn neg(&self) -> Self {
                self.scaled(-1.0)
            }

            pub fn add(&self, other: &Self) -> Self {
                Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
            }

            /// Largest absolute coordinate difference; used for tolerant comparisons.
            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                max_abs_diff(&self.coords, &other.coords)
            }
        }

        impl From<Vec<f64>> for $name {
            /// Unchecked conversion for internally generated coordinates.
            fn from(coords: Vec<f64>) -> Self {
                Self { coords }
            }
        }

        impl From<&[f64]> for $name {
            fn from(coords: &[f64]) -> Self {
                Self { coords: coords.to_vec() }
            }
        }

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.coords
            }
        }

        impl Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.coords[i]
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.coords)
            }
        }
    };
}

coordinate_type!(
    /// A point of the space `X = (R^n, ||.||)`.
    Vector
);
coordinate_type!(
    /// A point of the dual space `X*`, acting on vectors by the inner product.
    Functional
);

impl Vector {
    /// Reinterprets the coordinates as a functional (used when a space is
    /// viewed as the dual of its dual).
    pub fn as_functional(&self) -> Functional {
        Functional::from(self.coords.clone())
    }
}

impl Functional {
    pub fn as_vector(&self) -> Vector {
        Vector::from(self.coords.clone())
    }
}

/// `f(x) = sum f_i x_i`.
pub fn pairing(f: &Functional, x: &Vector) -> f64 {
    dot(f, x)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Solves the square system `m * z = rhs` by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot falls below `tol` relative
/// to the largest entry.
pub(crate) fn solve_square(m: &[Vec<f64>], rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(*r);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= tol * scale {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let factor = a[row][col] / a[col][col];
                if factor != 0.0 {
                    for k in col..=n {
                        a[row][k] -= factor * a[col][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Numerical rank of a set of row vectors.
pub(crate) fn rank(rows: &[&[f64]], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    let scale = a.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let pivot = (r..a.len())
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() <= tol * scale {
            continue;
        }
        a.swap(r, pivot);
        for row in (r + 1)..a.len() {
            let factor = a[row][col] / a[r][col];
            for k in col..cols {
                a[row][k] -= factor * a[r][k];
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Functional::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn solves_small_system() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let z = solve_square(&m, &[3.0, 5.0], 1e-12).unwrap();
        assert!((z[0] - 0.8).abs() < 1e-12 && (z[1] - 1.4).abs() < 1e-12);
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_square(&singular, &[1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn rank_detects_dependence() {
        let a = [1.0, 0.0, 1.0];
        let b = [0.0, 1.0, 1.0];
        let c = [1.0, 1.0, 2.0];
        assert_eq!(rank(&[&a, &b, &c], 1e-12), 2);
        assert_eq!(rank(&[&a, &b], 1e-12), 2);
    }
}
