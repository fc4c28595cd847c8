//! Lower bounds for the moduli by multistart pattern search over `A_X(delta)`.
//!
//! Every evaluated point is a feasible pair and every value an exact distance
//! to `Pi(X)`, so the best value found is a valid lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attainment::{l1_sum_witness, linf_sum_witness, BpbPoint, PiSolver};
use crate::error::{BpbError, Result};
use crate::geometry::{dot, Functional, Vector};
use crate::modulus::{check_delta, sqrt_2delta, ModulusEstimate};
use crate::spaces::{NormedSpace, SpaceKind, SumKind};

pub const DEFAULT_SEED: u64 = 0x0b9b_2008;
pub const DEFAULT_BUDGET: u64 = 200_000;

const INITIAL_STEP: f64 = 0.25;
const FINAL_STEP: f64 = 1e-7;
const RANDOM_STARTS: usize = 64;
/// Structured seeds refined by pattern search (the rest are only evaluated).
const REFINED_SEEDS: usize = 8;
/// Rounding slack on the pairing constraint, so boundary seeds such as
/// `(a y, -a g)` with `a^2 = delta - 1` are not lost to the last bit.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LowerOptions {
    /// Cap on distance evaluations.
    pub budget: u64,
    pub seed: u64,
    pub random_starts: usize,
}

impl Default for LowerOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, seed: DEFAULT_SEED, random_starts: RANDOM_STARTS }
    }
}

/// Best distance to `Pi(X)` found over `A_X(delta)` (or `A^S_X(delta)`).
pub fn phi_lower(space: &NormedSpace, delta: f64, spherical: bool, budget: u64) -> Result<ModulusEstimate> {
    phi_lower_with(space, delta, spherical, &LowerOptions { budget, ..LowerOptions::default() })
}

pub fn phi_lower_with(
    space: &NormedSpace,
    delta: f64,
    spherical: bool,
    opts: &LowerOptions,
) -> Result<ModulusEstimate> {
    check_delta(delta)?;
    let solver = PiSolver::new(space)?;
    let problem = Problem { space, solver: &solver, delta, spherical };
    let n = space.dim();

    let mut seeds: Vec<Vec<f64>> = structured_seeds(space, delta, spherical)
        .into_iter()
        .filter_map(|u| problem.project(u))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let anchors = norming_anchors(space);
    let randoms: Vec<Vec<f64>> =
        (0..opts.random_starts).filter_map(|_| problem.random_start(&anchors, &mut rng)).collect();
    if seeds.is_empty() && randoms.is_empty() {
        return Err(BpbError::BudgetTooSmall);
    }

    let mut evals = 0u64;
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(seeds.len());
    for (i, u) in seeds.iter().enumerate() {
        evals += 1;
        scored.push((problem.value(u)?, i));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut starts: Vec<Vec<f64>> = scored.iter().take(REFINED_SEEDS).map(|&(_, i)| seeds[i].clone()).collect();
    let best_seed = scored.first().map(|&(v, i)| (v, seeds[i].clone()));
    seeds.clear();
    starts.extend(randoms);

    let per_start = (opts.budget.saturating_sub(evals) / starts.len() as u64).max(1);
    let results: Vec<Result<(f64, Vec<f64>, u64)>> =
        starts.into_par_iter().map(|u| problem.pattern_search(u, per_start)).collect();
    let mut best = best_seed.unwrap_or((f64::NEG_INFINITY, Vec::new()));
    for r in results {
        let (v, u, e) = r?;
        evals += e;
        if v > best.0 {
            best = (v, u);
        }
    }
    if best.1.is_empty() {
        return Err(BpbError::BudgetTooSmall);
    }
    let (x, f) = best.1.split_at(n);
    let witness = BpbPoint { x: Vector::from(x), f: Functional::from(f), delta, spherical };
    Ok(ModulusEstimate::lower_only(delta, spherical, best.0.max(0.0), witness, evals))
}

struct Problem<'a> {
    space: &'a NormedSpace,
    solver: &'a PiSolver,
    delta: f64,
    spherical: bool,
}

impl Problem<'_> {
    fn project(&self, u: Vec<f64>) -> Option<Vec<f64>> {
        project_pair(self.space, u, self.delta, self.spherical)
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        let n = self.space.dim();
        self.solver.distance(&u[..n], &u[n..])
    }

    /// Coordinate pattern search maximising the distance; returns the best
    /// value, its point, and the evaluations spent.
    fn pattern_search(&self, mut u: Vec<f64>, budget: u64) -> Result<(f64, Vec<f64>, u64)> {
        let mut val = self.value(&u)?;
        let mut evals = 1;
        let mut step = INITIAL_STEP;
        while step >= FINAL_STEP && evals < budget {
            let mut improved = false;
            for i in 0..u.len() {
                for dir in [1.0, -1.0] {
                    if evals >= budget {
                        break;
                    }
                    let mut cand = u.clone();
                    cand[i] += dir * step;
                    let Some(cand) = self.project(cand) else { continue };
                    evals += 1;
                    let v = self.value(&cand)?;
                    if v > val {
                        val = v;
                        u = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok((val, u, evals))
    }

    /// A random feasible pair near a random norming pair.
    fn random_start(&self, anchors: &[(Vec<f64>, Vec<f64>)], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        if anchors.is_empty() {
            return None;
        }
        let n = self.space.dim();
        let (y, g) = &anchors[rng.random_range(0..anchors.len())];
        let mut radius = rng.random::<f64>() * 2.0 * sqrt_2delta(self.delta).min(1.0);
        let noise: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        for _ in 0..40 {
            let mut u: Vec<f64> = y.iter().chain(g).copied().collect();
            for (c, e) in u.iter_mut().zip(&noise) {
                *c += radius * e;
            }
            if let Some(u) = self.project(u) {
                return Some(u);
            }
            radius *= 0.5;
        }
        None
    }
}

/// Norming pairs spread over `Pi(X)`: face centroids for polytopal balls,
/// coordinate axes otherwise.
fn norming_anchors(space: &NormedSpace) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = space.dim();
    if let Some(ball) = space.ball() {
        let verts = ball.polytope().vertices();
        let dverts = ball.polar().vertices();
        let centroid = |vs: &[Vector], idx: &[usize]| -> Vec<f64> {
            (0..n).map(|k| idx.iter().map(|&i| vs[i][k]).sum::<f64>() / idx.len() as f64).collect()
        };
        return ball
            .lattice()
            .faces()
            .iter()
            .map(|face| {
                let conj = &ball.polar_lattice().faces()[face.conjugate];
                (centroid(verts, &face.vertices), centroid(dverts, &conj.vertices))
            })
            .collect();
    }
    (0..n)
        .flat_map(|i| {
            let e = Vector::basis(n, i);
            [e.clone(), e.neg()]
        })
        .filter_map(|x| {
            let x = x.scaled(1.0 / space.norm_raw(&x));
            let f = space.support_functional(&x).ok()?.functional;
            Some((x.into_coords(), f.into_coords()))
        })
        .collect()
}

/// Pairs from the closed-form examples: the floor pair `((1 - delta) y, g)`,
/// the antipodal pair for `delta > 1`, square and Hilbert pairs in every
/// coordinate plane, and the sum witnesses. Unprojected.
fn structured_seeds(space: &NormedSpace, delta: f64, spherical: bool) -> Vec<Vec<f64>> {
    let n = space.dim();
    let mut out = Vec::new();
    let join = |x: &[f64], f: &[f64]| x.iter().chain(f).copied().collect::<Vec<f64>>();
    for (y, g) in norming_anchors(space) {
        if !spherical && delta <= 1.0 {
            out.push(join(&y.iter().map(|c| c * (1.0 - delta)).collect::<Vec<_>>(), &g));
        }
        if delta > 1.0 {
            let a = (delta - 1.0).sqrt();
            out.push(join(&y.iter().map(|c| c * a).collect::<Vec<_>>(), &g.iter().map(|c| -c * a).collect::<Vec<_>>()));
        }
    }
    let s = sqrt_2delta(delta);
    let (h1, h2) = ((1.0 - delta / 2.0).sqrt(), (delta / 2.0).sqrt());
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut x = vec![0.0; n];
                let mut f = vec![0.0; n];
                x[i] = si * (1.0 - s);
                x[j] = sj;
                f[i] = si * s / 2.0;
                f[j] = sj * (1.0 - s / 2.0);
                out.push(join(&x, &f));
                if i < j {
                    let mut x = vec![0.0; n];
                    let mut f = vec![0.0; n];
                    x[i] = si * h1;
                    x[j] = sj * h2;
                    f[i] = si * h1;
                    f[j] = -sj * h2;
                    out.push(join(&x, &f));
                }
            }
        }
    }
    if let SpaceKind::DirectSum { combiner, .. } = space.kind() {
        let w = match combiner {
            SumKind::L1 => l1_sum_witness(space, delta),
            SumKind::LInf => linf_sum_witness(space, delta),
        };
        if let Ok(w) = w {
            out.push(join(&w.x, &w.f));
        }
    }
    out
}

/// Maps `u = (x, f)` into the ball product (or onto the spheres) and checks
/// the pairing constraint.
pub(crate) fn project_pair(space: &NormedSpace, mut u: Vec<f64>, delta: f64, spherical: bool) -> Option<Vec<f64>> {
    let n = space.dim();
    let nx = space.norm_raw(&u[..n]);
    let nf = space.dual_norm_raw(&u[n..]);
    // divide rather than multiply by the reciprocal: x / ||x|| is then
    // exactly a unit vector whenever x is a multiple of one
    let (sx, sf) = if spherical {
        if nx < 1e-12 || nf < 1e-12 {
            return None;
        }
        (nx, nf)
    } else {
        (nx.max(1.0), nf.max(1.0))
    };
    u[..n].iter_mut().for_each(|c| *c /= sx);
    u[n..].iter_mut().for_each(|c| *c /= sf);
    (dot(&u[..n], &u[n..]) >= 1.0 - delta - FEASIBILITY_SLACK).then_some(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_values() {
        let line = NormedSpace::line();
        let e = phi_lower(&line, 0.3, false, 20_000).unwrap();
        assert!((e.lower - 0.3).abs() < 1e-6, "{}", e.lower);
        let e = phi_lower(&line, 1.5, false, 20_000).unwrap();
        assert!((e.lower - (0.5_f64.sqrt() + 1.0)).abs() < 1e-6, "{}", e.lower);
        let e = phi_lower(&line, 1.5, true, 20_000).unwrap();
        assert_eq!(e.lower, 0.0);
    }

    #[test]
    fn square_reaches_cap() {
        let sq = NormedSpace::lp(f64::INFINITY, 2).unwrap();
        let e = phi_lower(&sq, 0.5, false, 50_000).unwrap();
        assert!(e.lower >= 1.0 - 1e-6);
        assert!(e.witness.as_ref().unwrap().is_valid(&sq));
    }

    #[test]
    fn hilbert_sphere() {
        let h = NormedSpace::euclidean(2).unwrap();
        let e = phi_lower(&h, 1.0, true, 50_000).unwrap();
        assert!(e.lower >= (2.0 - 2.0_f64.sqrt()).sqrt() - 1e-4);
    }

    #[test]
    fn deterministic() {
        let sq = NormedSpace::lp(1.0, 2).unwrap();
        let a = phi_lower(&sq, 0.7, true, 10_000).unwrap();
        let b = phi_lower(&sq, 0.7, true, 10_000).unwrap();
        assert_eq!(a, b);
    }
}
