//! Finite-dimensional real normed spaces: norms, dual norms, supporting
//! functionals and duals, plus the catalog of named spaces.

mod catalog;
mod symmetry;

use std::sync::Arc;

pub use catalog::{catalog, diamond_generators, CatalogParams, CATALOG_NAMES};
pub use symmetry::SignedPermutation;

use crate::error::{check_dim, BpbError, Result};
use crate::geometry::{dot, Functional, PolytopalBall, SymmetricPolytope, Vector};

/// How the parts of a direct sum are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `||(y, z)|| = ||y|| + ||z||`
    L1,
    /// `||(y, z)|| = max(||y||, ||z||)`
    LInf,
}

impl SumKind {
    pub fn dual(self) -> Self {
        match self {
            SumKind::L1 => SumKind::LInf,
            SumKind::LInf => SumKind::L1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    /// The real line.
    Line,
    /// `l_p^n`, `p` in `[1, inf]` (`f64::INFINITY` for the sup norm).
    Lp { p: f64, n: usize },
    /// The Euclidean space `R^n`.
    Euclidean(usize),
    /// `R^n` normed by an explicit symmetric polytope.
    Polytopal,
    DirectSum { parts: Vec<NormedSpace>, combiner: SumKind },
    /// The three-dimensional diamond space with parameter `eps` in `(0, 1)`.
    Diamond { eps: f64 },
}

/// A normed space `(R^n, ||.||)`. Immutable; the polytopal ball (when the
/// unit ball is a polytope of dimension at most four) is built eagerly.
#[derive(Debug, Clone)]
pub struct NormedSpace {
    kind: SpaceKind,
    dim: usize,
    ball: Option<Arc<PolytopalBall>>,
}

impl PartialEq for NormedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.dim == other.dim
            && match (&self.ball, &other.ball) {
                (Some(a), Some(b)) => a.polytope() == b.polytope(),
                (None, None) => true,
                _ => false,
            }
    }
}

/// A norming functional for a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportResult {
    /// For polytopal spaces: id (in the ball's face lattice) of the smallest
    /// face containing `x / ||x||`.
    pub face: Option<usize>,
    /// Dual norm one, `functional(x) = ||x||`.
    pub functional: Functional,
}

impl NormedSpace {
    pub(crate) fn from_parts(kind: SpaceKind, dim: usize, ball: Option<PolytopalBall>) -> Self {
        Self { kind, dim, ball: ball.map(Arc::new) }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The unit ball as a polytope, when it is one and was materialised.
    pub fn ball(&self) -> Option<&PolytopalBall> {
        self.ball.as_deref()
    }

    /// Euclidean geometry (`Euclidean(n)` or `l_2^n`), for which the norming
    /// pairs are the diagonal of the sphere.
    pub fn is_euclidean(&self) -> bool {
        match self.kind {
            SpaceKind::Euclidean(_) => true,
            SpaceKind::Lp { p, .. } => p == 2.0,
            _ => false,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match &self.kind {
            SpaceKind::Line => "line".into(),
            SpaceKind::Lp { p, n } if p.is_infinite() => format!("l_inf^{n}"),
            SpaceKind::Lp { p, n } => format!("l_{p}^{n}"),
            SpaceKind::Euclidean(n) => format!("euclidean^{n}"),
            SpaceKind::Polytopal => format!("polytopal^{}", self.dim),
            SpaceKind::DirectSum { parts, combiner } => {
                let sep = match combiner {
                    SumKind::L1 => " (+)_1 ",
                    SumKind::LInf => " (+)_inf ",
                };
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("[{}]", inner.join(sep))
            }
            SpaceKind::Diamond { eps } => format!("diamond(eps={eps})"),
        }
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.norm_raw(x))
    }

    pub fn dual_norm(&self, f: &Functional) -> Result<f64> {
        check_dim(self.dim, f.dim())?;
        Ok(self.dual_norm_raw(f))
    }

    /// Unchecked norm on raw coordinates (hot path of the searches).
    pub fn norm_raw(&self, x: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Line => x[0].abs(),
            SpaceKind::Lp { p, .. } => lp_norm(x, *p),
            SpaceKind::Euclidean(_) => lp_norm(x, 2.0),
            SpaceKind::Polytopal | SpaceKind::Diamond { .. } => {
                self.ball.as_ref().expect("polytopal space has a ball").norm(x)
            }
            SpaceKind::DirectSum { parts, combiner } => {
                combine(*combiner, split(parts, x).map(|(p, xs)| p.norm_raw(xs)))
            }
        }
    }

    pub fn dual_norm_raw(&self, f: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Line => f[0].abs(),
            SpaceKind::Lp { p, .. } => lp_norm(f, conjugate_exponent(*p)),
            SpaceKind::Euclidean(_) => lp_norm(f, 2.0),
            SpaceKind::Polytopal | SpaceKind::Diamond { .. } => {
                self.ball.as_ref().expect("polytopal space has a ball").dual_norm(f)
            }
            SpaceKind::DirectSum { parts, combiner } => {
                combine(combiner.dual(), split(parts, f).map(|(p, fs)| p.dual_norm_raw(fs)))
            }
        }
    }

    /// A functional of dual norm one attaining the norm of `x`.
    ///
    /// Polytopal spaces return the vertex centroid of the conjugate of the
    /// smallest face containing `x / ||x||`; this is deterministic and
    /// commutes with the isometries of the ball.
    pub fn support_functional(&self, x: &Vector) -> Result<SupportResult> {
        check_dim(self.dim, x.dim())?;
        let nx = self.norm_raw(x);
        if nx == 0.0 {
            return Err(BpbError::ZeroVector);
        }
        if let Some(ball) = &self.ball {
            let unit: Vec<f64> = x.iter().map(|c| c / nx).collect();
            let active: Vec<usize> = ball
                .facets()
                .iter()
                .enumerate()
                .filter(|(_, f)| dot(&f.normal, &unit) >= 1.0 - 1e-9)
                .map(|(i, _)| i)
                .collect();
            let mut f = vec![0.0; self.dim];
            for &i in &active {
                for (fk, nk) in f.iter_mut().zip(ball.facets()[i].normal.iter()) {
                    *fk += nk / active.len() as f64;
                }
            }
            let polar_face = ball.polar_lattice().find(&active);
            let face = polar_face.map(|id| ball.polar_lattice().faces()[id].conjugate);
            return Ok(SupportResult { face, functional: Functional::from(f) });
        }
        Ok(SupportResult { face: None, functional: Functional::from(self.support_raw(x)) })
    }

    fn support_raw(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            SpaceKind::Line => vec![x[0].signum()],
            SpaceKind::Euclidean(_) => lp_support(x, 2.0),
            SpaceKind::Lp { p, .. } => lp_support(x, *p),
            SpaceKind::DirectSum { parts, combiner } => {
                let pieces: Vec<(&NormedSpace, &[f64])> = split(parts, x).collect();
                let norms: Vec<f64> = pieces.iter().map(|(p, xs)| p.norm_raw(xs)).collect();
                let mut out = Vec::with_capacity(x.len());
                match combiner {
                    SumKind::L1 => {
                        for ((p, xs), n) in pieces.iter().zip(&norms) {
                            if *n > 0.0 {
                                out.extend(p.support_raw(xs));
                            } else {
                                out.extend(std::iter::repeat_n(0.0, xs.len()));
                            }
                        }
                    }
                    SumKind::LInf => {
                        let best = norms
                            .iter()
                            .enumerate()
                            .fold((0, f64::NEG_INFINITY), |acc, (i, &n)| if n > acc.1 { (i, n) } else { acc })
                            .0;
                        for (i, (p, xs)) in pieces.iter().enumerate() {
                            if i == best {
                                out.extend(p.support_raw(xs));
                            } else {
                                out.extend(std::iter::repeat_n(0.0, xs.len()));
                            }
                        }
                    }
                }
                out
            }
            SpaceKind::Polytopal | SpaceKind::Diamond { .. } => unreachable!("handled through the ball"),
        }
    }

    /// The dual space `X*`, realised on the same coordinates.
    pub fn dual_space(&self) -> Result<NormedSpace> {
        Ok(match &self.kind {
            SpaceKind::Line => NormedSpace::line(),
            SpaceKind::Lp { p, n } => NormedSpace::lp(conjugate_exponent(*p), *n)?,
            SpaceKind::Euclidean(n) => NormedSpace::euclidean(*n)?,
            SpaceKind::Polytopal | SpaceKind::Diamond { .. } => {
                let ball = self.ball.as_ref().expect("polytopal space has a ball").dual()?;
                NormedSpace::from_parts(SpaceKind::Polytopal, self.dim, Some(ball))
            }
            SpaceKind::DirectSum { parts, combiner } => {
                let duals = parts.iter().map(|p| p.dual_space()).collect::<Result<Vec<_>>>()?;
                NormedSpace::direct_sum(duals, combiner.dual())?
            }
        })
    }

    /// Symmetries of the unit ball among signed coordinate permutations.
    /// They act identically on the dual ball.
    pub fn isometries(&self) -> Vec<SignedPermutation> {
        symmetry::isometries(self)
    }

    /// Vertices of the unit ball when it is polytopal.
    pub fn ball_vertices(&self) -> Option<&[Vector]> {
        self.ball.as_ref().map(|b| b.polytope().vertices())
    }

    /// The polytope of the unit ball when materialised.
    pub fn polytope(&self) -> Option<&SymmetricPolytope> {
        self.ball.as_ref().map(|b| b.polytope())
    }

    /// Bounding half-widths of the unit ball and of the dual ball along
    /// each coordinate axis.
    pub fn coordinate_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim;
        if let Some(ball) = &self.ball {
            let bound = |pts: &[Vector]| -> Vec<f64> {
                (0..n).map(|i| pts.iter().map(|v| v[i].abs()).fold(0.0, f64::max)).collect()
            };
            return (bound(ball.polytope().vertices()), bound(ball.polar().vertices()));
        }
        // |x_i| <= ||x|| * ||e_i||*, and symmetrically for the dual.
        let primal = (0..n).map(|i| self.dual_norm_raw(&Functional::basis(n, i))).collect();
        let dual = (0..n).map(|i| self.norm_raw(&Vector::basis(n, i))).collect();
        (primal, dual)
    }
}

fn split<'a>(parts: &'a [NormedSpace], x: &'a [f64]) -> impl Iterator<Item = (&'a NormedSpace, &'a [f64])> + 'a {
    let mut start = 0;
    parts.iter().map(move |p| {
        let s = &x[start..start + p.dim];
        start += p.dim;
        (p, s)
    })
}

fn combine(kind: SumKind, values: impl Iterator<Item = f64>) -> f64 {
    match kind {
        SumKind::L1 => values.sum(),
        SumKind::LInf => values.fold(0.0, f64::max),
    }
}

/// Hölder conjugate: `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_support(x: &[f64], p: f64) -> Vec<f64> {
    let n = lp_norm(x, p);
    if p.is_infinite() {
        let i = (0..x.len()).fold(0, |b, i| if x[i].abs() > x[b].abs() { i } else { b });
        let mut f = vec![0.0; x.len()];
        f[i] = x[i].signum();
        f
    } else if p == 1.0 {
        x.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect()
    } else {
        x.iter().map(|v| v.signum() * (v.abs() / n).powf(p - 1.0)).collect()
    }
}
