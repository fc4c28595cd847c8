//! Signed-permutation isometries of a space.
//!
//! A signed permutation matrix is orthogonal, so the same map sends the unit
//! ball to itself and the dual ball to itself, and preserves the pairing.

use crate::geometry::{Vector, MAX_DIM};
use crate::spaces::{NormedSpace, SpaceKind};

const VERTEX_MATCH_TOL: f64 = 1e-12;

/// The linear map `y_i = signs_i * x_{perm_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn negation(n: usize) -> Self {
        Self { perm: (0..n).collect(), signs: vec![-1; n] }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.perm.iter().zip(&self.signs).map(|(&j, &s)| f64::from(s) * x[j]).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j) && self.signs.iter().all(|&s| s == 1)
    }
}

/// Every signed permutation of `R^n`.
pub(crate) fn all_signed_permutations(n: usize) -> Vec<SignedPermutation> {
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << n);
    for perm in perms {
        for mask in 0..1usize << n {
            let signs = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            out.push(SignedPermutation { perm: perm.clone(), signs });
        }
    }
    out
}

fn permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// The signed permutations preserving the unit ball, identity first.
pub(crate) fn isometries(space: &NormedSpace) -> Vec<SignedPermutation> {
    let n = space.dim();
    let mut out = if n > MAX_DIM {
        vec![SignedPermutation::identity(n), SignedPermutation::negation(n)]
    } else {
        match (space.kind(), space.ball_vertices()) {
            (_, Some(verts)) => all_signed_permutations(n)
                .into_iter()
                .filter(|g| preserves(g, verts))
                .collect(),
            (SpaceKind::Euclidean(_) | SpaceKind::Lp { .. }, None) => all_signed_permutations(n),
            _ => vec![SignedPermutation::identity(n), SignedPermutation::negation(n)],
        }
    };
    out.sort_by_key(|g| !g.is_identity());
    out
}

fn preserves(g: &SignedPermutation, verts: &[Vector]) -> bool {
    verts.iter().all(|v| {
        let w = g.apply(v);
        verts.iter().any(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() <= VERTEX_MATCH_TOL))
    })
}
