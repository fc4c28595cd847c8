//! The line-oriented space file format.
//!
//! ```text
//! bpb-space 1
//! # comments and blank lines are ignored
//! kind l1sum
//! part
//!   kind line
//! end
//! part
//!   kind diamond
//!   eps 0.5
//! end
//! ```
//!
//! Keys are `kind`, `eps`, `p`, `n`, `vertex <coords>` (repeatable) and
//! nested `part ... end` blocks. For `kind polytopal` the vertex list defines
//! the ball; for catalog kinds it is an optional declaration that must agree
//! with the catalog ball. Numbers are written in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use bpb_core::geometry::{SymmetricPolytope, Vector};
use bpb_core::spaces::{catalog, CatalogParams, NormedSpace, SpaceKind, SumKind, CATALOG_NAMES};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SPEC_HEADER: &str = "bpb-space";
pub const SPEC_VERSION: u32 = 1;
/// Declared and catalog vertices closer than this (max-abs) match.
pub const VERTEX_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpaceSpec {
    /// A catalog name or `polytopal`.
    pub kind: String,
    pub eps: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub vertices: Vec<Vec<f64>>,
    pub parts: Vec<SpaceSpec>,
}

impl SpaceSpec {
    pub fn named(kind: &str) -> Self {
        Self { kind: kind.to_string(), ..Self::default() }
    }

    /// Builds the space without checking declared vertices.
    pub fn build(&self) -> Result<NormedSpace, CliError> {
        if self.kind == "polytopal" {
            if self.vertices.is_empty() {
                return Err(CliError::Parse("polytopal space without vertices".into()));
            }
            let verts = self.vertices.iter().cloned().map(Vector::from).collect();
            return NormedSpace::polytopal(verts).map_err(|e| CliError::Parse(e.to_string()));
        }
        if !CATALOG_NAMES.contains(&self.kind.as_str()) {
            return Err(CliError::Parse(format!("unknown kind `{}`", self.kind)));
        }
        let parts = self.parts.iter().map(|p| p.load()).collect::<Result<Vec<_>, _>>()?;
        let params = CatalogParams { eps: self.eps, p: self.p, n: self.n, parts };
        catalog(&self.kind, &params).map_err(|e| match e {
            bpb_core::BpbError::UnsupportedSpace(m) => CliError::Unsupported(m),
            other => CliError::Parse(other.to_string()),
        })
    }

    /// Builds the space and requires declared vertices to match it.
    pub fn load(&self) -> Result<NormedSpace, CliError> {
        let space = self.build()?;
        self.check_declared_vertices(&space).map_err(CliError::Parse)?;
        Ok(space)
    }

    /// Declared vertices of a catalog kind against the catalog ball.
    pub fn check_declared_vertices(&self, space: &NormedSpace) -> Result<(), String> {
        if self.kind == "polytopal" || self.vertices.is_empty() {
            return Ok(());
        }
        let Some(ball) = space.polytope() else {
            return Err(format!("{} has no polytopal ball to compare vertices with", space.label()));
        };
        let declared = SymmetricPolytope::new(self.vertices.iter().cloned().map(Vector::from).collect())
            .map_err(|e| format!("declared vertices: {e}"))?;
        if declared.same_vertex_set(ball, VERTEX_MATCH_TOL) {
            Ok(())
        } else {
            Err(format!("declared vertices differ from the {} ball", self.kind))
        }
    }

    /// The spec of a space; `with_vertices` also lists its ball vertices.
    pub fn from_space(space: &NormedSpace, with_vertices: bool) -> Self {
        let mut spec = match space.kind() {
            SpaceKind::Line => Self::named("line"),
            SpaceKind::Lp { p, n: 2 } if p.is_infinite() => Self::named("linf2"),
            SpaceKind::Lp { p, n: 2 } if *p == 1.0 => Self::named("l1-2"),
            SpaceKind::Lp { p, n } => Self { p: Some(*p), n: Some(*n), ..Self::named("lp") },
            SpaceKind::Euclidean(n) => Self { n: Some(*n), ..Self::named("euclidean") },
            SpaceKind::Diamond { eps } => Self { eps: Some(*eps), ..Self::named("diamond") },
            SpaceKind::Polytopal => Self {
                vertices: space.ball_vertices().map(|v| v.iter().map(|x| x.to_vec()).collect()).unwrap_or_default(),
                ..Self::named("polytopal")
            },
            SpaceKind::DirectSum { parts, combiner } => Self {
                parts: parts.iter().map(|p| Self::from_space(p, false)).collect(),
                ..Self::named(match combiner {
                    SumKind::L1 => "l1sum",
                    SumKind::LInf => "linfsum",
                })
            },
        };
        if with_vertices && spec.kind != "polytopal" {
            if let Some(v) = space.ball_vertices() {
                spec.vertices = v.iter().map(|x| x.to_vec()).collect();
            }
        }
        spec
    }

    /// Canonical text form.
    pub fn print(&self) -> String {
        let mut out = format!("{SPEC_HEADER} {SPEC_VERSION}\n");
        self.print_body(&mut out, 0);
        out
    }

    fn print_body(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(out, "{pad}kind {}", self.kind);
        if let Some(eps) = self.eps {
            let _ = writeln!(out, "{pad}eps {}", fmt_num(eps));
        }
        if let Some(p) = self.p {
            let _ = writeln!(out, "{pad}p {}", fmt_num(p));
        }
        if let Some(n) = self.n {
            let _ = writeln!(out, "{pad}n {n}");
        }
        for v in &self.vertices {
            let coords: Vec<String> = v.iter().map(|&c| fmt_num(c)).collect();
            let _ = writeln!(out, "{pad}vertex {}", coords.join(" "));
        }
        for part in &self.parts {
            let _ = writeln!(out, "{pad}part");
            part.print_body(out, depth + 1);
            let _ = writeln!(out, "{pad}end");
        }
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.print().as_bytes()))
    }
}

/// Shortest decimal that parses back to the same value; `inf` for infinity.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // adding zero turns -0 into 0
        format!("{}", x + 0.0)
    }
}

pub fn parse(text: &str) -> Result<SpaceSpec, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (no, header) = lines.next().ok_or_else(|| CliError::Parse("empty space file".into()))?;
    let mut words = header.split_whitespace();
    if words.next() != Some(SPEC_HEADER) {
        return Err(err(no, &format!("expected `{SPEC_HEADER} {SPEC_VERSION}` header")));
    }
    match words.next().map(str::parse::<u32>) {
        Some(Ok(SPEC_VERSION)) => {}
        Some(Ok(v)) => return Err(err(no, &format!("unsupported format version {v}"))),
        _ => return Err(err(no, "missing format version")),
    }
    let spec = parse_body(&mut lines, false)?;
    Ok(spec)
}

fn parse_body<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, nested: bool) -> Result<SpaceSpec, CliError> {
    let mut spec = SpaceSpec::default();
    let mut closed = false;
    while let Some((no, line)) = lines.next() {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "kind" if spec.kind.is_empty() => spec.kind = rest.to_string(),
            "eps" if spec.eps.is_none() => spec.eps = Some(num(no, rest)?),
            "p" if spec.p.is_none() => spec.p = Some(num(no, rest)?),
            "n" if spec.n.is_none() => {
                spec.n = Some(rest.parse().map_err(|_| err(no, &format!("bad dimension `{rest}`")))?)
            }
            "vertex" => {
                let v = rest.split_whitespace().map(|w| num(no, w)).collect::<Result<Vec<_>, _>>()?;
                if v.is_empty() {
                    return Err(err(no, "vertex without coordinates"));
                }
                spec.vertices.push(v);
            }
            "part" if rest.is_empty() => spec.parts.push(parse_body(lines, true)?),
            "end" if nested && rest.is_empty() => {
                closed = true;
                break;
            }
            "kind" | "eps" | "p" | "n" => return Err(err(no, &format!("duplicate `{key}`"))),
            _ => return Err(err(no, &format!("unexpected `{line}`"))),
        }
    }
    if nested && !closed {
        return Err(CliError::Parse("unterminated `part` block".into()));
    }
    if spec.kind.is_empty() {
        return Err(CliError::Parse("missing `kind`".into()));
    }
    Ok(spec)
}

fn num(line: usize, w: &str) -> Result<f64, CliError> {
    match w.parse::<f64>() {
        Ok(x) if !x.is_nan() => Ok(x),
        _ => Err(err(line, &format!("bad number `{w}`"))),
    }
}

fn err(line: usize, msg: &str) -> CliError {
    CliError::Parse(format!("line {line}: {msg}"))
}

/// A file path, or an inline shorthand when no such file exists:
/// `linf2`, `euclidean2`, `diamond:eps=0.6`, `lp:p=3,n=2`, `l1sum:line+l1-2`.
pub fn resolve(arg: &str) -> Result<SpaceSpec, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
        return parse(&text);
    }
    inline(arg)
}

fn inline(arg: &str) -> Result<SpaceSpec, CliError> {
    let (name, rest) = arg.split_once(':').unwrap_or((arg, ""));
    let mut spec = match name {
        "euclidean2" | "euclidean3" => SpaceSpec { n: Some(name[9..].parse().unwrap()), ..SpaceSpec::named("euclidean") },
        _ if CATALOG_NAMES.contains(&name) => SpaceSpec::named(name),
        _ => return Err(CliError::Parse(format!("`{arg}` is neither a file nor a known space"))),
    };
    if (name == "l1sum" || name == "linfsum") && !rest.is_empty() {
        spec.parts = rest.split('+').map(inline).collect::<Result<_, _>>()?;
        return Ok(spec);
    }
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Parse(format!("expected key=value, got `{kv}`")))?;
        match k {
            "eps" => spec.eps = Some(num(0, v)?),
            "p" => spec.p = Some(num(0, v)?),
            "n" => spec.n = Some(v.parse().map_err(|_| CliError::Parse(format!("bad dimension `{v}`")))?),
            _ => return Err(CliError::Parse(format!("unknown parameter `{k}`"))),
        }
    }
    Ok(spec)
}
