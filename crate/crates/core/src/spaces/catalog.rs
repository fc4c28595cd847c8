//! Constructors for the named spaces.

use crate::error::{BpbError, Result};
use crate::geometry::{PolytopalBall, SymmetricPolytope, Vector, MAX_DIM};
use crate::spaces::{NormedSpace, SpaceKind, SumKind};

pub const CATALOG_NAMES: [&str; 8] = ["line", "linf2", "l1-2", "lp", "euclidean", "l1sum", "linfsum", "diamond"];

/// Parameters accepted by [`catalog`]; unused fields are ignored.
#[derive(Debug, Clone, Default)]
pub struct CatalogParams {
    pub eps: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub parts: Vec<NormedSpace>,
}

/// Builds a named space.
pub fn catalog(name: &str, params: &CatalogParams) -> Result<NormedSpace> {
    match name {
        "line" => Ok(NormedSpace::line()),
        "linf2" => NormedSpace::lp(f64::INFINITY, 2),
        "l1-2" => NormedSpace::lp(1.0, 2),
        "lp" => {
            let p = params.p.ok_or_else(|| BpbError::BadParameter("lp needs p".into()))?;
            let n = params.n.ok_or_else(|| BpbError::BadParameter("lp needs n".into()))?;
            NormedSpace::lp(p, n)
        }
        "euclidean" => NormedSpace::euclidean(params.n.unwrap_or(2)),
        "l1sum" => NormedSpace::l1_sum(params.parts.clone()),
        "linfsum" => NormedSpace::linf_sum(params.parts.clone()),
        "diamond" => {
            let eps = params.eps.ok_or_else(|| BpbError::BadParameter("diamond needs eps".into()))?;
            NormedSpace::diamond(eps)
        }
        other => Err(BpbError::UnknownSpace(other.to_string())),
    }
}

/// The eleven generators `A_1..A_11` of the diamond ball; the ball is their
/// absolute convex hull.
pub fn diamond_generators(eps: f64) -> [Vector; 11] {
    let h = eps / 2.0;
    let a = 1.0 - eps;
    [
        vec![0.0, 0.0, 0.75],
        vec![a, 1.0, h],
        vec![a, -1.0, h],
        vec![-a, 1.0, h],
        vec![-a, -1.0, h],
        vec![1.0, a, h],
        vec![-1.0, a, h],
        vec![1.0, -a, h],
        vec![-1.0, -a, h],
        vec![1.0, 1.0, 0.0],
        vec![1.0, -1.0, 0.0],
    ]
    .map(Vector::from)
}

impl NormedSpace {
    pub fn line() -> Self {
        let seg = SymmetricPolytope::new(vec![Vector::from(vec![1.0]), Vector::from(vec![-1.0])])
            .expect("segment is a valid polytope");
        let ball = PolytopalBall::new(seg).expect("segment ball");
        Self::from_parts(SpaceKind::Line, 1, Some(ball))
    }

    /// `l_p^n`; the unit ball is materialised for `p` in `{1, inf}` and `n <= 4`.
    pub fn lp(p: f64, n: usize) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(BpbError::BadParameter(format!("exponent p = {p} must be >= 1")));
        }
        if n == 0 {
            return Err(BpbError::BadParameter("dimension must be positive".into()));
        }
        let ball = if (p == 1.0 || p.is_infinite()) && n <= MAX_DIM {
            let vertices = if p == 1.0 { cross_polytope(n) } else { cube(n) };
            Some(PolytopalBall::new(SymmetricPolytope::new(vertices)?)?)
        } else {
            None
        };
        Ok(Self::from_parts(SpaceKind::Lp { p, n }, n, ball))
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BpbError::BadParameter("dimension must be positive".into()));
        }
        Ok(Self::from_parts(SpaceKind::Euclidean(n), n, None))
    }

    /// `R^n` normed by the polytope with these vertices.
    pub fn polytopal(vertices: Vec<Vector>) -> Result<Self> {
        let poly = SymmetricPolytope::new(vertices)?;
        let dim = poly.dim();
        Ok(Self::from_parts(SpaceKind::Polytopal, dim, Some(PolytopalBall::new(poly)?)))
    }

    pub fn from_ball(ball: PolytopalBall) -> Self {
        let dim = ball.dim();
        Self::from_parts(SpaceKind::Polytopal, dim, Some(ball))
    }

    pub fn l1_sum(parts: Vec<NormedSpace>) -> Result<Self> {
        Self::direct_sum(parts, SumKind::L1)
    }

    pub fn linf_sum(parts: Vec<NormedSpace>) -> Result<Self> {
        Self::direct_sum(parts, SumKind::LInf)
    }

    /// Direct sum; materialised as a polytope when every part is polytopal
    /// and the total dimension is at most four.
    pub fn direct_sum(parts: Vec<NormedSpace>, combiner: SumKind) -> Result<Self> {
        if parts.len() < 2 {
            return Err(BpbError::BadParameter("a direct sum needs at least two parts".into()));
        }
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let ball = if dim <= MAX_DIM && parts.iter().all(|p| p.ball().is_some()) {
            let vertex_sets: Vec<&[Vector]> = parts.iter().map(|p| p.ball_vertices().unwrap()).collect();
            let vertices = match combiner {
                SumKind::L1 => l1_sum_vertices(&vertex_sets, dim),
                SumKind::LInf => linf_sum_vertices(&vertex_sets),
            };
            Some(PolytopalBall::new(SymmetricPolytope::new(vertices)?)?)
        } else {
            None
        };
        Ok(Self::from_parts(SpaceKind::DirectSum { parts, combiner }, dim, ball))
    }

    /// The diamond space for `eps` in `(0, 1)`.
    pub fn diamond(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(BpbError::BadParameter(format!("diamond needs eps in (0, 1), got {eps}")));
        }
        let gens = diamond_generators(eps);
        let vertices: Vec<Vector> = gens.iter().flat_map(|a| [a.clone(), a.neg()]).collect();
        let poly = SymmetricPolytope::new(vertices)?;
        Ok(Self::from_parts(SpaceKind::Diamond { eps }, 3, Some(PolytopalBall::new(poly)?)))
    }
}

fn cross_polytope(n: usize) -> Vec<Vector> {
    (0..n)
        .flat_map(|i| {
            let e = Vector::basis(n, i);
            [e.clone(), e.neg()]
        })
        .collect()
}

fn cube(n: usize) -> Vec<Vector> {
    (0..1usize << n)
        .map(|mask| Vector::from((0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect::<Vec<_>>()))
        .collect()
}

fn l1_sum_vertices(parts: &[&[Vector]], dim: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in parts {
        for v in part.iter() {
            let mut c = vec![0.0; dim];
            c[offset..offset + v.dim()].copy_from_slice(v);
            out.push(Vector::from(c));
        }
        offset += part[0].dim();
    }
    out
}

fn linf_sum_vertices(parts: &[&[Vector]]) -> Vec<Vector> {
    let mut acc: Vec<Vec<f64>> = vec![Vec::new()];
    for part in parts {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                part.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.extend_from_slice(v);
                    c
                })
            })
            .collect();
    }
    acc.into_iter().map(Vector::from).collect()
}
