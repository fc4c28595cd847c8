//! Copies of `l_inf^2` through the two-vector test: unit `u, v` with
//! `||u + v|| = ||u - v|| = 2` span one, with `(u + v) / 2` and `(u - v) / 2`
//! as a sup-norm basis. The squareness defect measures how far a space is
//! from having such a pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BpbError, Result};
use crate::geometry::Vector;
use crate::modulus::{phi_upper_certified_with, sqrt_2delta, UpperOptions};
use crate::spaces::NormedSpace;

/// Margin above which a defect counts as uniformly non-square.
pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const DEFAULT_SQUARE_BUDGET: u64 = 100_000;
const SQUARE_SEED: u64 = 0x5157_0a2e;
const RANDOM_STARTS: usize = 32;
const FINAL_STEP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareWitness {
    pub u: Vector,
    pub v: Vector,
    /// `2 - min(||u + v||, ||u - v||)`.
    pub defect: f64,
    /// Best defect over pairs of ball vertices, before refinement (polytopal
    /// spaces only).
    pub vertex_defect: Option<f64>,
}

impl SquareWitness {
    /// Basis `((u + v) / 2, (u - v) / 2)` of the spanned square; for a zero
    /// defect the induced norm is `max(|a|, |b|)` in these coordinates.
    pub fn square_basis(&self) -> (Vector, Vector) {
        (self.u.add(&self.v).scaled(0.5), self.u.sub(&self.v).scaled(0.5))
    }
}

pub fn defect_of(space: &NormedSpace, u: &[f64], v: &[f64]) -> f64 {
    let plus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let minus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    2.0 - space.norm_raw(&plus).min(space.norm_raw(&minus))
}

/// Smallest defect found over `S_X x S_X`: every vertex pair when the ball
/// is a polytope, then pattern-search refinement from the best pairs and
/// from random starts. An upper bound on the infimum.
pub fn squareness_defect(space: &NormedSpace, budget: u64) -> Result<SquareWitness> {
    let n = space.dim();
    if n < 2 {
        return Err(BpbError::BadParameter("squareness needs dimension at least 2".into()));
    }
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut vertex_defect = None;
    if let Some(verts) = space.ball_vertices() {
        let mut best = f64::INFINITY;
        for (i, u) in verts.iter().enumerate() {
            for v in &verts[i + 1..] {
                let d = defect_of(space, u, v);
                best = best.min(d);
                candidates.push((d, u.iter().chain(v.iter()).copied().collect()));
            }
        }
        vertex_defect = Some(best);
    }
    for i in 0..n {
        for j in i + 1..n {
            let (ei, ej) = (Vector::basis(n, i), Vector::basis(n, j));
            for (a, b) in [(ei.clone(), ej.clone()), (ei.add(&ej), ei.sub(&ej))] {
                let u = normalize(space, a.into_coords());
                let v = normalize(space, b.into_coords());
                if let (Some(u), Some(v)) = (u, v) {
                    let d = defect_of(space, &u, &v);
                    candidates.push((d, u.into_iter().chain(v).collect()));
                }
            }
        }
    }
    // stable sort keeps enumeration order among equal defects
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut starts: Vec<Vec<f64>> = candidates.iter().take(8).map(|c| c.1.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SQUARE_SEED);
    for _ in 0..RANDOM_STARTS {
        let w: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if let Some(w) = normalize_pair(space, w) {
            starts.push(w);
        }
    }
    let mut best = candidates.first().cloned().unwrap_or((f64::INFINITY, Vec::new()));
    let per_start = (budget / starts.len().max(1) as u64).max(1);
    for s in starts {
        let (d, w) = refine(space, s, per_start);
        if d < best.0 {
            best = (d, w);
        }
    }
    if best.1.is_empty() {
        return Err(BpbError::BudgetTooSmall);
    }
    let (u, v) = best.1.split_at(n);
    Ok(SquareWitness { u: Vector::from(u), v: Vector::from(v), defect: best.0.max(0.0), vertex_defect })
}

fn normalize(space: &NormedSpace, mut x: Vec<f64>) -> Option<Vec<f64>> {
    let nx = space.norm_raw(&x);
    if nx < 1e-12 {
        return None;
    }
    x.iter_mut().for_each(|c| *c /= nx);
    Some(x)
}

fn normalize_pair(space: &NormedSpace, w: Vec<f64>) -> Option<Vec<f64>> {
    let n = space.dim();
    let u = normalize(space, w[..n].to_vec())?;
    let v = normalize(space, w[n..].to_vec())?;
    Some(u.into_iter().chain(v).collect())
}

fn refine(space: &NormedSpace, mut w: Vec<f64>, budget: u64) -> (f64, Vec<f64>) {
    let n = space.dim();
    let mut val = defect_of(space, &w[..n], &w[n..]);
    let mut evals = 1;
    let mut step = 0.25;
    while step >= FINAL_STEP && evals < budget && val > 0.0 {
        let mut improved = false;
        for i in 0..w.len() {
            for dir in [1.0, -1.0] {
                let mut c = w.clone();
                c[i] += dir * step;
                let Some(c) = normalize_pair(space, c) else { continue };
                evals += 1;
                let d = defect_of(space, &c[..n], &c[n..]);
                if d < val {
                    val = d;
                    w = c;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (val, w)
}

pub fn is_uniformly_non_square(defect: f64, margin: f64) -> bool {
    defect > margin
}

/// One `delta` of a containment check.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentRow {
    pub delta: f64,
    pub upper: f64,
    pub cap: f64,
    /// Certified `upper < sqrt(2 delta)`.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub dual_defect: f64,
    pub margin: f64,
    /// The dual is uniformly non-square, so every row must be strict.
    pub hypothesis: bool,
    pub rows: Vec<ContainmentRow>,
    /// Deltas where the hypothesis holds but the certificate was not strict.
    pub violations: Vec<f64>,
    /// Rows that are strict although the dual does contain a square: the
    /// square in the dual is necessary for `Phi = sqrt(2 delta)`, not
    /// sufficient.
    pub strict_despite_square: Vec<f64>,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Numerical contrapositive of the finite-dimensional containment theorem:
/// if the dual has no `l_inf^2` copy (defect above `margin`), the modulus
/// must stay strictly below `sqrt(2 delta)` for `delta` in `(0, 1/2)`.
pub fn containment_check(
    space: &NormedSpace,
    deltas: &[f64],
    margin: f64,
    upper: &UpperOptions,
) -> Result<ContainmentReport> {
    let dual = space.dual_space()?;
    let dual_defect = squareness_defect(&dual, DEFAULT_SQUARE_BUDGET)?.defect;
    let hypothesis = is_uniformly_non_square(dual_defect, margin);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut strict_despite_square = Vec::new();
    for &delta in deltas.iter().filter(|&&d| d > 0.0 && d < 0.5) {
        let est = phi_upper_certified_with(space, delta, false, upper)?;
        let cap = sqrt_2delta(delta);
        let bound = est.certificate_bound.unwrap_or(est.upper);
        let strict = bound < cap;
        if hypothesis && !strict {
            violations.push(delta);
        }
        if !hypothesis && strict {
            strict_despite_square.push(delta);
        }
        rows.push(ContainmentRow { delta, upper: bound, cap, strict });
    }
    Ok(ContainmentReport { dual_defect, margin, hypothesis, rows, violations, strict_despite_square })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_spaces_have_zero_defect() {
        for s in [
            NormedSpace::lp(f64::INFINITY, 2).unwrap(),
            NormedSpace::lp(1.0, 2).unwrap(),
            NormedSpace::diamond(0.5).unwrap(),
        ] {
            let w = squareness_defect(&s, 20_000).unwrap();
            assert!(w.defect.abs() < 1e-12, "{}: {w:?}", s.label());
            assert!((s.norm_raw(&w.u) - 1.0).abs() < 1e-9 && (s.norm_raw(&w.v) - 1.0).abs() < 1e-9);
            assert!((w.vertex_defect.unwrap() - w.defect).abs() < 1e-6);
        }
    }

    #[test]
    fn diamond_square_lies_in_the_flat_slice() {
        let d = NormedSpace::diamond(0.4).unwrap();
        let w = squareness_defect(&d, 20_000).unwrap();
        assert!(w.u[2].abs() < 1e-12 && w.v[2].abs() < 1e-12, "{w:?}");
        let (e1, e2) = w.square_basis();
        for i in 0..10 {
            for j in 0..10 {
                let (a, b) = (i as f64 / 4.5 - 1.0, j as f64 / 4.5 - 1.0);
                let x = e1.scaled(a).add(&e2.scaled(b));
                assert!((d.norm_raw(&x) - a.abs().max(b.abs())).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn euclidean_defect() {
        let h = NormedSpace::euclidean(2).unwrap();
        let w = squareness_defect(&h, 20_000).unwrap();
        assert!((w.defect - (2.0 - 2.0_f64.sqrt())).abs() < 1e-9);
        assert!(w.vertex_defect.is_none());
    }

    #[test]
    fn line_is_rejected() {
        assert!(squareness_defect(&NormedSpace::line(), 100).is_err());
    }
}
