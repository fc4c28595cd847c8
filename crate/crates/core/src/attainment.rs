//! The set `Pi(X)` of norming pairs, the sets `A_X(delta)`, and the exact
//! distance from a pair `(x, f)` to `Pi(X)` in the max-distance on
//! `X x X*`.
//!
//! For a polytopal ball, `Pi(X)` is the union of `E x conj(E)` over proper
//! faces `E`. Since the objective `max(||x - y||, ||f - g||*)` separates over
//! such a product, each face pair costs two small LPs.

use crate::error::{check_dim, BpbError, Result};
use crate::geometry::{dot, Functional, HullDistance, PolytopalBall, Vector};
use crate::spaces::{NormedSpace, SpaceKind, SumKind};

/// Tolerance for the norming-pair invariants.
pub const PAIR_TOL: f64 = 1e-9;

/// An element of `Pi(X)`: `||x|| = ||f||* = f(x) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormingPair {
    pub x: Vector,
    pub f: Functional,
}

impl NormingPair {
    /// Largest violation of the three defining equalities.
    pub fn violation(&self, space: &NormedSpace) -> f64 {
        let nx = space.norm_raw(&self.x);
        let nf = space.dual_norm_raw(&self.f);
        let p = dot(&self.f, &self.x);
        (nx - 1.0).abs().max((nf - 1.0).abs()).max((p - 1.0).abs())
    }

    pub fn is_valid(&self, space: &NormedSpace) -> bool {
        self.violation(space) <= PAIR_TOL
    }
}

/// A pair in `A_X(delta)` (or `A^S_X(delta)` when `spherical`). Membership
/// uses the closed condition `f(x) >= 1 - delta`, which changes no modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct BpbPoint {
    pub x: Vector,
    pub f: Functional,
    pub delta: f64,
    pub spherical: bool,
}

impl BpbPoint {
    pub fn pairing(&self) -> f64 {
        dot(&self.f, &self.x)
    }

    pub fn is_valid(&self, space: &NormedSpace) -> bool {
        let nx = space.norm_raw(&self.x);
        let nf = space.dual_norm_raw(&self.f);
        let in_balls = if self.spherical {
            (nx - 1.0).abs() <= PAIR_TOL && (nf - 1.0).abs() <= PAIR_TOL
        } else {
            nx <= 1.0 + PAIR_TOL && nf <= 1.0 + PAIR_TOL
        };
        in_balls && self.pairing() >= 1.0 - self.delta - PAIR_TOL
    }
}

/// One product `E x conj(E)` inside `Pi(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePair {
    /// Face id in the ball's lattice.
    pub face: usize,
    /// Id of the conjugate in the polar lattice.
    pub conjugate: usize,
    pub vertices: Vec<Vector>,
    pub dual_vertices: Vec<Functional>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PiDecomposition {
    FacePairs(Vec<FacePair>),
    /// `Pi(H) = {(z, z) : z in S_H}` for the Euclidean space of this dimension.
    EuclideanDiagonal { dim: usize },
}

impl PiDecomposition {
    /// Number of face pairs; `None` for the continuous Euclidean diagonal.
    pub fn pair_count(&self) -> Option<usize> {
        match self {
            PiDecomposition::FacePairs(p) => Some(p.len()),
            PiDecomposition::EuclideanDiagonal { .. } => None,
        }
    }
}

pub fn pi_decomposition(space: &NormedSpace) -> Result<PiDecomposition> {
    if space.is_euclidean() {
        return Ok(PiDecomposition::EuclideanDiagonal { dim: space.dim() });
    }
    let ball = polytopal_ball(space)?;
    let verts = ball.polytope().vertices();
    let dverts = ball.polar().vertices();
    let pairs = ball
        .lattice()
        .faces()
        .iter()
        .enumerate()
        .map(|(id, face)| {
            let conj = &ball.polar_lattice().faces()[face.conjugate];
            FacePair {
                face: id,
                conjugate: face.conjugate,
                vertices: face.vertices.iter().map(|&i| verts[i].clone()).collect(),
                dual_vertices: conj.vertices.iter().map(|&i| dverts[i].as_functional()).collect(),
            }
        })
        .collect();
    Ok(PiDecomposition::FacePairs(pairs))
}

fn polytopal_ball(space: &NormedSpace) -> Result<&PolytopalBall> {
    space.ball().ok_or_else(|| {
        BpbError::UnsupportedSpace(format!("{} has no finite face lattice", space.label()))
    })
}

/// `dist_inf((x, f), Pi(X))` and a nearest norming pair.
pub fn dist_to_pi(space: &NormedSpace, x: &Vector, f: &Functional) -> Result<(f64, NormingPair)> {
    check_dim(space.dim(), x.dim())?;
    check_dim(space.dim(), f.dim())?;
    PiSolver::new(space)?.solve(x, f)
}

/// Exact distance to `Pi(H)` in Euclidean `R^n`: minimises
/// `max(|x - z|, |f - z|)` over unit `z`.
///
/// Both terms only depend on `z . x` and `z . f`, so the optimum lies in
/// `span{x, f}`. On that circle the minimum of a max of two functions is at a
/// minimiser of one of them or where they cross; all are enumerated.
pub fn dist_to_pi_euclidean(x: &[f64], f: &[f64]) -> Result<(f64, NormingPair)> {
    check_dim(x.len(), f.len())?;
    let n = x.len();
    if n == 0 {
        return Err(BpbError::BadParameter("zero-dimensional space".into()));
    }
    let eval = |z: &[f64]| {
        let dx = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let df = f.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        dx.max(df).sqrt()
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if n == 1 {
        candidates.push(vec![1.0]);
        candidates.push(vec![-1.0]);
    } else {
        let (e1, e2) = plane_basis(x, f);
        let to_plane = |v: &[f64]| (dot(v, &e1), dot(v, &e2));
        let (x1, x2) = to_plane(x);
        let (f1, f2) = to_plane(f);
        let mut angles = vec![0.0, std::f64::consts::PI];
        for (a, b) in [(x1, x2), (f1, f2)] {
            if a.hypot(b) > 0.0 {
                angles.push(b.atan2(a));
            }
        }
        // crossing: z . (x - f) = (|x|^2 - |f|^2) / 2
        let (d1, d2) = (x1 - f1, x2 - f2);
        let dn = d1.hypot(d2);
        if dn > 1e-15 {
            let c = (dot(x, x) - dot(f, f)) / 2.0 / dn;
            if c.abs() <= 1.0 {
                let base = d2.atan2(d1);
                let spread = c.acos();
                angles.push(base + spread);
                angles.push(base - spread);
            }
        }
        for t in angles {
            let (c, s) = (t.cos(), t.sin());
            candidates.push(e1.iter().zip(&e2).map(|(a, b)| c * a + s * b).collect());
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for z in candidates {
        let v = eval(&z);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, z));
        }
    }
    let (d, z) = best.expect("at least two candidates");
    Ok((d, NormingPair { x: Vector::from(z.clone()), f: Functional::from(z) }))
}

/// Orthonormal `e1, e2` whose span contains `x` and `f`.
fn plane_basis(x: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let unit = |v: &[f64]| {
        let l = dot(v, v).sqrt();
        (l > 1e-15).then(|| v.iter().map(|c| c / l).collect::<Vec<f64>>())
    };
    let e1 = unit(x).or_else(|| unit(f)).unwrap_or_else(|| Vector::basis(n, 0).into_coords());
    let mut e2 = None;
    for cand in std::iter::once(f.to_vec()).chain((0..n).map(|i| Vector::basis(n, i).into_coords())) {
        let p = dot(&cand, &e1);
        let r: Vec<f64> = cand.iter().zip(&e1).map(|(c, e)| c - p * e).collect();
        if dot(&r, &r).sqrt() > 1e-9 {
            e2 = unit(&r);
            break;
        }
    }
    (e1, e2.expect("n >= 2 admits an orthogonal direction"))
}

/// Reusable solver for distances to `Pi(X)` of one space.
#[derive(Debug, Clone)]
pub struct PiSolver {
    dim: usize,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Euclidean,
    Faces { ball: std::sync::Arc<PolytopalBall>, pairs: Vec<PairData> },
}

#[derive(Debug, Clone)]
struct PairData {
    primal: HullDistance,
    dual: HullDistance,
    /// Vertices of `E` (flattened); each is a facet normal of the polar
    /// ball through `conj(E)`.
    e_vertices: Vec<f64>,
    /// Vertices of `conj(E)`: facet normals of the ball through `E`.
    conj_vertices: Vec<f64>,
}

impl PiSolver {
    pub fn new(space: &NormedSpace) -> Result<Self> {
        if space.is_euclidean() {
            return Ok(Self { dim: space.dim(), inner: Inner::Euclidean });
        }
        if let SpaceKind::Lp { p, n } = space.kind() {
            if space.ball().is_none() {
                return Err(BpbError::UnsupportedSpace(format!("l_{p}^{n}: smooth ball, no face lattice")));
            }
        }
        let ball = polytopal_ball(space)?;
        let dim = ball.dim();
        let flat = |vs: &[Vector], idx: &[usize]| -> Vec<f64> {
            idx.iter().flat_map(|&i| vs[i].iter().copied()).collect()
        };
        let verts = ball.polytope().vertices();
        let dverts = ball.polar().vertices();
        let all: Vec<usize> = (0..verts.len()).collect();
        let dall: Vec<usize> = (0..dverts.len()).collect();
        let ball_flat = flat(verts, &all);
        let dball_flat = flat(dverts, &dall);
        let pairs = ball
            .lattice()
            .faces()
            .iter()
            .map(|face| {
                let conj = &ball.polar_lattice().faces()[face.conjugate];
                let e_vertices = flat(verts, &face.vertices);
                let conj_vertices = flat(dverts, &conj.vertices);
                PairData {
                    primal: HullDistance::new(dim, &e_vertices, &ball_flat),
                    dual: HullDistance::new(dim, &conj_vertices, &dball_flat),
                    e_vertices,
                    conj_vertices,
                }
            })
            .collect();
        let ball = std::sync::Arc::new(ball.clone());
        Ok(Self { dim, inner: Inner::Faces { ball, pairs } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, x: &[f64], f: &[f64]) -> Result<(f64, NormingPair)> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, f.len())?;
        let q = Query { x, f, ox: 0.0, of: 0.0, cutoff: f64::INFINITY, satisfice: f64::NEG_INFINITY };
        self.run(&q).map(|r| r.expect("an infinite cutoff always yields a pair"))
    }

    /// Like [`Self::solve`] but may stop early once the distance is known to
    /// be at least `cutoff`, in which case `None` is returned.
    pub fn solve_below(&self, x: &[f64], f: &[f64], cutoff: f64) -> Result<Option<(f64, NormingPair)>> {
        self.run(&Query { x, f, ox: 0.0, of: 0.0, cutoff, satisfice: f64::NEG_INFINITY })
    }

    /// Distance only; cheaper entry point for searches.
    pub fn distance(&self, x: &[f64], f: &[f64]) -> Result<f64> {
        self.solve(x, f).map(|r| r.0)
    }

    /// `min over (y, g) in Pi(X) of max(||x - y|| + ox, ||f - g||* + of)`,
    /// which bounds the distance to `Pi(X)` from every pair in the box of
    /// radii `(ox, of)` around `(x, f)`.
    ///
    /// The returned value is always attained by some norming pair, so it is an
    /// upper bound of the minimum; it is exact unless it is at most
    /// `satisfice`, where the search stops early.
    pub fn offset_bound(&self, x: &[f64], f: &[f64], ox: f64, of: f64, satisfice: f64) -> Result<f64> {
        match &self.inner {
            Inner::Euclidean => Ok(dist_to_pi_euclidean(x, f)?.0 + ox.max(of)),
            Inner::Faces { .. } => {
                let q = Query { x, f, ox, of, cutoff: f64::INFINITY, satisfice };
                Ok(self.run(&q)?.expect("an infinite cutoff always yields a pair").0)
            }
        }
    }

    fn run(&self, q: &Query) -> Result<Option<(f64, NormingPair)>> {
        match &self.inner {
            Inner::Euclidean => {
                let (d, w) = dist_to_pi_euclidean(q.x, q.f)?;
                Ok((d < q.cutoff).then_some((d, w)))
            }
            Inner::Faces { ball, pairs } => solve_faces(ball, pairs, self.dim, q),
        }
    }
}

struct Query<'a> {
    x: &'a [f64],
    f: &'a [f64],
    ox: f64,
    of: f64,
    cutoff: f64,
    satisfice: f64,
}

/// Cheap bounds first, then LPs only for pairs whose lower bound can still
/// beat the incumbent. Pairs are scanned in index order among equals, so the
/// result does not depend on anything but the inputs.
fn solve_faces(ball: &PolytopalBall, pairs: &[PairData], dim: usize, q: &Query) -> Result<Option<(f64, NormingPair)>> {
    let (x, f) = (q.x, q.f);
    let mut scratch = vec![0.0; dim];
    let mut bounds: Vec<(f64, usize)> = Vec::with_capacity(pairs.len());
    let mut best = q.cutoff;
    let mut best_pair: Option<(Vec<f64>, Vec<f64>)> = None;
    let done = |best: f64, bp: Option<(Vec<f64>, Vec<f64>)>| {
        Ok(bp.map(|(y, g)| (best, NormingPair { x: Vector::from(y), f: Functional::from(g) })))
    };
    for (k, p) in pairs.iter().enumerate() {
        // f(E-vertex) = 1 on conj(E) and vertices have norm 1, and dually.
        let mut lx = 0.0_f64;
        for n in p.conj_vertices.chunks_exact(dim) {
            lx = lx.max(1.0 - dot(n, x));
        }
        let mut lf = 0.0_f64;
        for v in p.e_vertices.chunks_exact(dim) {
            lf = lf.max(1.0 - dot(f, v));
        }
        let lb = (lx + q.ox).max(lf + q.of);
        bounds.push((lb, k));
        if lb >= best {
            continue;
        }
        let (ux, vx) = nearest_vertex(&p.e_vertices, dim, x, &mut scratch, |d| ball.norm(d));
        let (uf, vf) = nearest_vertex(&p.conj_vertices, dim, f, &mut scratch, |d| ball.dual_norm(d));
        let ub = (ux + q.ox).max(uf + q.of);
        if ub < best {
            best = ub;
            best_pair = Some((vx.to_vec(), vf.to_vec()));
        }
    }
    if best <= q.satisfice {
        return done(best, best_pair);
    }
    bounds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(lb, k) in &bounds {
        if lb >= best {
            break;
        }
        let p = &pairs[k];
        let (dx, y) = p.primal.solve(x)?;
        if dx + q.ox >= best {
            continue;
        }
        let (df, g) = p.dual.solve(f)?;
        let d = (dx + q.ox).max(df + q.of);
        if d < best {
            best = d;
            best_pair = Some((y, g));
            if best <= q.satisfice {
                break;
            }
        }
    }
    done(best, best_pair)
}

fn nearest_vertex<'a>(
    verts: &'a [f64],
    dim: usize,
    p: &[f64],
    scratch: &mut [f64],
    norm: impl Fn(&[f64]) -> f64,
) -> (f64, &'a [f64]) {
    let mut best = (f64::INFINITY, &verts[..dim]);
    for v in verts.chunks_exact(dim) {
        for i in 0..dim {
            scratch[i] = p[i] - v[i];
        }
        let d = norm(scratch);
        if d < best.0 {
            best = (d, v);
        }
    }
    best
}

/// Some norming pair of `space`, used to build sum witnesses.
pub fn some_norming_pair(space: &NormedSpace) -> Result<NormingPair> {
    let n = space.dim();
    let x = match space.ball_vertices() {
        Some(v) => v[0].clone(),
        None => {
            let e = Vector::basis(n, 0);
            e.scaled(1.0 / space.norm_raw(&e))
        }
    };
    let f = space.support_functional(&x)?.functional;
    Ok(NormingPair { x, f })
}

/// The pair from the maximality argument for `l_1`-sums `Y (+)_1 Z`:
/// `x0 = (s/2 y0, (1 - s/2) z0)`, `x0* = ((1 - s) y0*, z0*)`, `s = sqrt(2 delta)`,
/// with pairing exactly `1 - delta`. For `l_inf`-sums the roles of the space
/// and its dual swap: `x0 = ((1 - s) y0, z0)`, `x0* = (s/2 y0*, (1 - s/2) z0*)`.
pub fn l1_sum_witness(space: &NormedSpace, delta: f64) -> Result<BpbPoint> {
    sum_witness(space, delta, SumKind::L1)
}

pub fn linf_sum_witness(space: &NormedSpace, delta: f64) -> Result<BpbPoint> {
    sum_witness(space, delta, SumKind::LInf)
}

fn sum_witness(space: &NormedSpace, delta: f64, want: SumKind) -> Result<BpbPoint> {
    let parts = match space.kind() {
        SpaceKind::DirectSum { parts, combiner } if *combiner == want => parts,
        _ => return Err(BpbError::BadParameter(format!("{} is not a {want:?} direct sum", space.label()))),
    };
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(BpbError::BadParameter(format!("witness needs delta in (0, 1/2], got {delta}")));
    }
    // Y is the first part, Z the sum of the rest (both non-trivial).
    let y = some_norming_pair(&parts[0])?;
    let z_space;
    let z_ref = if parts.len() == 2 {
        &parts[1]
    } else {
        z_space = NormedSpace::direct_sum(parts[1..].to_vec(), want)?;
        &z_space
    };
    let z = some_norming_pair(z_ref)?;
    let s = (2.0 * delta).sqrt();
    let (ax, bx, af, bf) = match want {
        SumKind::L1 => (s / 2.0, 1.0 - s / 2.0, 1.0 - s, 1.0),
        SumKind::LInf => (1.0 - s, 1.0, s / 2.0, 1.0 - s / 2.0),
    };
    let mut xc = y.x.scaled(ax).into_coords();
    xc.extend(z.x.scaled(bx).into_coords());
    let mut fc = y.f.scaled(af).into_coords();
    fc.extend(z.f.scaled(bf).into_coords());
    Ok(BpbPoint { x: Vector::from(xc), f: Functional::from(fc), delta, spherical: true })
}
