//! Certified upper bounds by best-first Lipschitz branch and bound.
//!
//! `g(x, f) = dist((x, f), Pi(X))` is 1-Lipschitz for the max-distance on
//! `X x X*` everywhere, not only on `A_X(delta)`. So for a box `B` with
//! centre `(cx, cf)` and covering radii `rx, rf` (largest norm, resp. dual
//! norm, from the centre to a corner),
//!
//! ```text
//! sup over B of g <= min over (y, g) in Pi of max(||cx - y|| + rx, ||cf - g||* + rf)
//! ```
//!
//! whether or not the centre itself is feasible. Boxes that provably miss
//! the A-set, or that lie outside a fundamental domain of the isometry group,
//! are dropped. The largest bound over the remaining leaves is an upper bound
//! for the modulus. Splitting stops when that leaf is within `h` of the best
//! known lower bound, or has covering radius at most `h / 2`, so that the
//! result never exceeds the true modulus by more than `h`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::attainment::{BpbPoint, PiSolver};
use crate::geometry::{Functional, Vector};
use crate::error::{BpbError, Result};
use crate::modulus::lower::{phi_lower_with, project_pair, LowerOptions};
use crate::modulus::{check_delta, sqrt_2delta, ModulusEstimate, CAP_TOL};
use crate::spaces::NormedSpace;

/// Dimension limit for certified runs (boxes live in `R^(2n)`).
pub const MAX_CERTIFIED_DIM: usize = 3;
/// Largest `delta` accepted by certified runs.
pub const MAX_CERTIFIED_DELTA: f64 = 1.9;
pub const DEFAULT_BOX_BUDGET: u64 = 4_000_000;
/// Leaves smaller than `mesh * RADIUS_FLOOR` are not split further even if
/// their bound stays above `lower + mesh`.
const RADIUS_FLOOR: f64 = 1.0 / 16.0;

#[derive(Debug, Clone)]
pub struct UpperOptions {
    pub mesh: f64,
    /// Cap on box evaluations.
    pub budget: u64,
    pub lower: LowerOptions,
}

impl UpperOptions {
    pub fn with_mesh(mesh: f64) -> Self {
        Self { mesh, budget: DEFAULT_BOX_BUDGET, lower: LowerOptions::default() }
    }
}

pub fn phi_upper_certified(space: &NormedSpace, delta: f64, spherical: bool, mesh: f64) -> Result<ModulusEstimate> {
    phi_upper_certified_with(space, delta, spherical, &UpperOptions::with_mesh(mesh))
}

pub fn phi_upper_certified_with(
    space: &NormedSpace,
    delta: f64,
    spherical: bool,
    opts: &UpperOptions,
) -> Result<ModulusEstimate> {
    check_delta(delta)?;
    if opts.mesh.is_nan() || opts.mesh <= 0.0 {
        return Err(BpbError::BadParameter(format!("mesh must be positive, got {}", opts.mesh)));
    }
    if space.dim() > MAX_CERTIFIED_DIM {
        return Err(BpbError::UnsupportedSpace(format!(
            "certified bounds need dimension <= {MAX_CERTIFIED_DIM}, got {}",
            space.dim()
        )));
    }
    if delta > MAX_CERTIFIED_DELTA {
        return Err(BpbError::OutOfDomain(format!("certified runs need delta <= {MAX_CERTIFIED_DELTA}")));
    }
    if space.ball().is_none() && !space.is_euclidean() {
        return Err(BpbError::UnsupportedSpace(format!("{}: no certified bounds for this ball", space.label())));
    }
    let solver = PiSolver::new(space)?;
    let lower = phi_lower_with(space, delta, spherical, &opts.lower)?;
    let bb = BranchAndBound::new(space, &solver, delta, spherical, opts.mesh);
    let outcome = bb.run(lower.lower, opts.budget)?;
    let lower = improve_lower(lower, &outcome, space, delta, spherical);
    let cap = sqrt_2delta(delta);
    let upper_est = ModulusEstimate {
        delta,
        spherical,
        lower: 0.0,
        upper: outcome.upper.min(cap),
        witness: None,
        witness_distance: 0.0,
        mesh: Some(opts.mesh),
        certified: true,
        vacuous: outcome.upper >= cap - CAP_TOL,
        resolved: outcome.resolved,
        certificate_bound: Some(outcome.upper),
        evaluations: outcome.boxes,
    };
    Ok(ModulusEstimate::merge(&lower, &upper_est))
}

#[derive(Debug, Clone)]
struct Outcome {
    upper: f64,
    /// Best feasible pair met while splitting, with its distance.
    found: Option<(f64, Vec<f64>)>,
    resolved: bool,
    boxes: u64,
}

struct Leaf {
    ub: f64,
    radius: f64,
    seq: u64,
    center: Vec<f64>,
    half: Vec<f64>,
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Leaf {}
impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Leaf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub).then(other.seq.cmp(&self.seq))
    }
}

struct BranchAndBound<'a> {
    space: &'a NormedSpace,
    solver: &'a PiSolver,
    n: usize,
    delta: f64,
    spherical: bool,
    mesh: f64,
    /// Rows `a - T^t a`: the domain is where all of them are nonnegative.
    domain: Vec<Vec<f64>>,
    /// Per-coordinate scale of the norm and of the dual norm, for splitting.
    scale: Vec<f64>,
}

impl<'a> BranchAndBound<'a> {
    fn new(space: &'a NormedSpace, solver: &'a PiSolver, delta: f64, spherical: bool, mesh: f64) -> Self {
        let n = space.dim();
        let a: Vec<f64> = (0..n).map(|i| (n - i) as f64 + 0.5_f64.powi(i as i32 + 2)).collect();
        let domain = space
            .isometries()
            .into_iter()
            .filter(|g| !g.is_identity())
            .map(|g| {
                let mut row = a.clone();
                for (i, (&j, &s)) in g.perm.iter().zip(&g.signs).enumerate() {
                    row[j] -= a[i] * f64::from(s);
                }
                row
            })
            .collect();
        let mut scale = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            scale.push(space.norm_raw(&e));
        }
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            scale.push(space.dual_norm_raw(&e));
        }
        Self { space, solver, n, delta, spherical, mesh, domain, scale }
    }

    fn run(&self, mut lower: f64, budget: u64) -> Result<Outcome> {
        let mut found: Option<(f64, Vec<f64>)> = None;
        let (bx, bf) = self.space.coordinate_bounds();
        let center = vec![0.0; 2 * self.n];
        let half: Vec<f64> = bx.iter().chain(&bf).copied().collect();
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        let mut boxes = 0u64;
        if let Some(leaf) = self.evaluate(center, half, f64::INFINITY, lower, &mut seq)? {
            heap.push(leaf);
        }
        boxes += 1;
        loop {
            let Some(top) = heap.peek() else {
                // Every box was dropped below the known lower bound.
                return Ok(Outcome { upper: lower, found, resolved: true, boxes });
            };
            if top.ub <= lower + self.mesh || top.radius <= self.mesh * RADIUS_FLOOR {
                return Ok(Outcome { upper: top.ub.max(lower), found, resolved: true, boxes });
            }
            if boxes >= budget {
                return Ok(Outcome { upper: top.ub.max(lower), found, resolved: false, boxes });
            }
            let top = heap.pop().expect("peeked");
            // The centre of the worst box, pulled into the A-set, often beats
            // the search's lower bound and lets the loop stop sooner.
            if let Some(p) = project_pair(self.space, top.center.clone(), self.delta, self.spherical) {
                let (x, f) = p.split_at(self.n);
                let d = self.solver.distance(x, f)?;
                boxes += 1;
                if d > lower {
                    lower = d;
                    found = Some((d, p));
                }
            }
            let k = self.split_axis(&top.half);
            for side in [-1.0, 1.0] {
                let mut c = top.center.clone();
                let mut h = top.half.clone();
                h[k] /= 2.0;
                c[k] += side * h[k];
                boxes += 1;
                if let Some(leaf) = self.evaluate(c, h, top.ub, lower, &mut seq)? {
                    heap.push(leaf);
                }
            }
        }
    }

    fn split_axis(&self, half: &[f64]) -> usize {
        (0..half.len())
            .max_by(|&i, &j| (half[i] * self.scale[i]).total_cmp(&(half[j] * self.scale[j])).then(j.cmp(&i)))
            .expect("non-empty box")
    }

    /// Bound for a box, or `None` if it cannot contain a relevant point.
    fn evaluate(&self, center: Vec<f64>, half: Vec<f64>, parent_ub: f64, lower: f64, seq: &mut u64) -> Result<Option<Leaf>> {
        let n = self.n;
        let (cx, cf) = center.split_at(n);
        let (wx, wf) = half.split_at(n);
        let (lo_x, hi_x) = self.norm_range(cx, wx, false);
        let (lo_f, hi_f) = self.norm_range(cf, wf, true);
        if lo_x > 1.0 || lo_f > 1.0 {
            return Ok(None);
        }
        if self.spherical && (hi_x < 1.0 || hi_f < 1.0) {
            return Ok(None);
        }
        if max_pairing(cx, wx, cf, wf) < 1.0 - self.delta {
            return Ok(None);
        }
        for row in &self.domain {
            let top: f64 = row.iter().zip(cx.iter().zip(wx)).map(|(r, (c, w))| r * c + r.abs() * w).sum();
            if top < -1e-12 {
                return Ok(None);
            }
        }
        let zeros = vec![0.0; n];
        let rx = self.norm_range(&zeros, wx, false).1;
        let rf = self.norm_range(&zeros, wf, true).1;
        let ub = self.solver.offset_bound(cx, cf, rx, rf, lower)?.min(parent_ub);
        if ub <= lower {
            return Ok(None);
        }
        *seq += 1;
        Ok(Some(Leaf { ub, radius: rx.max(rf), seq: *seq, center, half }))
    }

    /// `(lower bound of the min, max)` of the norm (or dual norm) on a box.
    fn norm_range(&self, c: &[f64], w: &[f64], dual: bool) -> (f64, f64) {
        match self.space.ball() {
            Some(ball) if dual => ball.dual_norm_range_on_box(c, w),
            Some(ball) => ball.norm_range_on_box(c, w),
            None => {
                let lo = c.iter().zip(w).map(|(c, w)| (c.abs() - w).max(0.0).powi(2)).sum::<f64>().sqrt();
                let hi = c.iter().zip(w).map(|(c, w)| (c.abs() + w).powi(2)).sum::<f64>().sqrt();
                (lo, hi)
            }
        }
    }
}

fn improve_lower(
    mut est: ModulusEstimate,
    outcome: &Outcome,
    space: &NormedSpace,
    delta: f64,
    spherical: bool,
) -> ModulusEstimate {
    if let Some((d, u)) = &outcome.found {
        if *d > est.lower {
            let (x, f) = u.split_at(space.dim());
            est.lower = *d;
            est.witness_distance = *d;
            est.witness = Some(BpbPoint { x: Vector::from(x), f: Functional::from(f), delta, spherical });
        }
    }
    est
}

/// Upper bound of `f(x)` over the box, termwise exact.
fn max_pairing(cx: &[f64], wx: &[f64], cf: &[f64], wf: &[f64]) -> f64 {
    cx.iter()
        .zip(wx)
        .zip(cf.iter().zip(wf))
        .map(|((c, w), (d, v))| {
            let (a0, a1) = (c - w, c + w);
            let (b0, b1) = (d - v, d + v);
            (a0 * b0).max(a0 * b1).max(a1 * b0).max(a1 * b1)
        })
        .sum()
}
