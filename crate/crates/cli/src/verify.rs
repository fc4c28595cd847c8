//! Named verification suites comparing computed moduli with the known
//! closed forms and structural facts.

use std::fmt::Write as _;

use bpb_core::attainment::{dist_to_pi, l1_sum_witness, linf_sum_witness, PiSolver};
use bpb_core::geometry::{polar, Vector};
use bpb_core::modulus::{
    phi_lower_with, phi_upper_certified_with, reference_phi, sqrt_2delta, LowerOptions, UpperOptions,
};
use bpb_core::spaces::{diamond_generators, NormedSpace, SignedPermutation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::record::ResultRecord;
use crate::specfile::SpaceSpec;
use crate::{CliError, Output, EXIT_FAILED_CHECK};

pub const SUITES: [&str; 7] = ["line", "hilbert", "linf2", "l1sum", "diamond", "duality", "all"];

/// Fixed multistart seed of each suite.
pub fn suite_seed(suite: &str) -> u64 {
    0x0b9b_2008 ^ suite.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Default)]
struct Checks {
    suite: String,
    out: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: String, expected: String, computed: String, pass: bool) {
        self.out.push(Check { suite: self.suite.clone(), name, expected, computed, pass });
    }

    fn close(&mut self, name: String, expected: f64, computed: f64, tol: f64) {
        let pass = (computed - expected).abs() <= tol;
        self.push(name, format!("{expected:.9} +- {tol:e}"), format!("{computed:.9}"), pass);
    }

    fn at_most(&mut self, name: String, bound: f64, computed: f64) {
        self.push(name, format!("<= {bound:.9}"), format!("{computed:.9}"), computed <= bound);
    }

    fn at_least(&mut self, name: String, bound: f64, computed: f64) {
        self.push(name, format!(">= {bound:.9}"), format!("{computed:.9}"), computed >= bound);
    }

    fn error(&mut self, name: String, e: impl std::fmt::Display) {
        self.push(name, "no error".into(), e.to_string(), false);
    }
}

fn lower_opts(seed: u64) -> LowerOptions {
    LowerOptions { seed, ..LowerOptions::default() }
}

fn mode(spherical: bool) -> &'static str {
    if spherical { "spherical" } else { "full" }
}

/// Runs one suite (or `all`), plus the space checks when `space` is given.
pub fn run(suite: &str, space: Option<&SpaceSpec>) -> Result<Vec<Check>, CliError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES[..6].to_vec(),
        "space" if space.is_some() => vec![],
        s if SUITES.contains(&s) => vec![s],
        s => return Err(CliError::Parse(format!("unknown suite `{s}`"))),
    };
    let mut all = Vec::new();
    for name in names {
        let mut c = Checks { suite: name.to_string(), out: Vec::new() };
        let seed = suite_seed(name);
        let r = match name {
            "line" => line(&mut c, seed),
            "hilbert" => hilbert(&mut c, seed),
            "linf2" => square(&mut c, seed),
            "l1sum" => sums(&mut c),
            "diamond" => diamond(&mut c, seed),
            _ => duality(&mut c, seed),
        };
        if let Err(e) = r {
            c.error("run".into(), e);
        }
        all.extend(c.out);
    }
    if let Some(spec) = space {
        let mut c = Checks { suite: "space".into(), out: Vec::new() };
        space_checks(&mut c, spec, suite_seed("space"));
        all.extend(c.out);
    }
    Ok(all)
}

pub fn report(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{tag}  {}/{}  expected {}  computed {}", c.suite, c.name, c.expected, c.computed);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(s, "{} checks, {failed} failed", checks.len());
    s
}

pub fn verify(suite: &str, space: Option<&SpaceSpec>) -> Result<Output, CliError> {
    let checks = run(suite, space)?;
    let failed = checks.iter().any(|c| !c.pass);
    let seeds: Vec<(String, u64)> = checks
        .iter()
        .map(|c| c.suite.clone())
        .fold(Vec::<String>::new(), |mut v, s| {
            if !v.contains(&s) {
                v.push(s);
            }
            v
        })
        .into_iter()
        .map(|s| {
            let seed = suite_seed(&s);
            (s, seed)
        })
        .collect();
    let record = ResultRecord::new(
        "verify",
        space,
        json!({ "suite": suite, "seeds": seeds }),
        json!(checks
            .iter()
            .map(|c| json!({ "suite": c.suite, "name": c.name, "expected": c.expected, "computed": c.computed, "pass": c.pass }))
            .collect::<Vec<_>>()),
    );
    Ok(Output {
        stdout: report(&checks),
        code: if failed { EXIT_FAILED_CHECK } else { 0 },
        artifact: Some(record.to_json()),
    })
}

type Res = bpb_core::Result<()>;

fn line(c: &mut Checks, seed: u64) -> Res {
    let s = NormedSpace::line();
    for delta in [0.2, 0.7, 1.0, 1.2, 1.8] {
        let lower = phi_lower_with(&s, delta, false, &lower_opts(seed))?;
        c.close(format!("phi delta={delta}"), reference_phi("line", delta, false)?, lower.lower, 1e-6);
        let sph = phi_lower_with(&s, delta, true, &lower_opts(seed))?;
        c.push(format!("phi_s delta={delta}"), "0 exactly".into(), format!("{}", sph.lower), sph.lower == 0.0);
    }
    for delta in [0.7, 1.8] {
        let up = phi_upper_certified_with(&s, delta, false, &UpperOptions::with_mesh(0.02))?;
        c.at_least(format!("certified upper delta={delta}"), reference_phi("line", delta, false)? - 1e-8, up.upper);
    }
    Ok(())
}

fn hilbert(c: &mut Checks, seed: u64) -> Res {
    let h = NormedSpace::euclidean(2)?;
    for (spherical, deltas) in [(true, &[0.2, 0.5, 0.9][..]), (false, &[0.2, 0.5, 0.9, 1.2, 1.6][..])] {
        for &delta in deltas {
            let est = phi_lower_with(&h, delta, spherical, &lower_opts(seed))?;
            let reference = reference_phi("euclidean", delta, spherical)?;
            c.close(format!("{} delta={delta}", mode(spherical)), reference, est.lower, 5e-3);
        }
    }
    let mesh = 0.02;
    let up = phi_upper_certified_with(&h, 0.5, false, &UpperOptions::with_mesh(mesh))?;
    let reference = reference_phi("euclidean", 0.5, false)?;
    c.at_least("certified upper delta=0.5 covers reference".into(), reference - 1e-8, up.upper);
    c.at_most("certified upper delta=0.5 within mesh".into(), reference + mesh + 1e-6, up.upper);
    Ok(())
}

fn square(c: &mut Checks, seed: u64) -> Res {
    let s = NormedSpace::lp(f64::INFINITY, 2)?;
    for spherical in [false, true] {
        for delta in [0.1, 0.3, 0.5, 1.0, 1.5, 1.9] {
            let mesh = if delta <= 1.0 { 0.02 } else { 0.05 };
            let opts = UpperOptions { lower: lower_opts(seed), ..UpperOptions::with_mesh(mesh) };
            let est = phi_upper_certified_with(&s, delta, spherical, &opts)?;
            let cap = sqrt_2delta(delta);
            let tag = format!("{} delta={delta}", mode(spherical));
            c.at_least(format!("{tag} lower"), cap - 1e-3, est.lower);
            c.at_most(format!("{tag} certificate"), cap + mesh + 1e-6, est.certificate_bound.unwrap_or(f64::INFINITY));
        }
    }
    Ok(())
}

fn sums(c: &mut Checks) -> Res {
    let line = NormedSpace::line;
    let cases = [
        ("l1^2", NormedSpace::l1_sum(vec![line(), line()])?, true),
        ("l1^3", NormedSpace::l1_sum(vec![line(), NormedSpace::lp(1.0, 2)?])?, true),
        ("linf^2", NormedSpace::linf_sum(vec![line(), line()])?, false),
        ("linf^3", NormedSpace::linf_sum(vec![line(), NormedSpace::lp(f64::INFINITY, 2)?])?, false),
    ];
    for (name, s, l1) in &cases {
        for delta in [0.1, 0.3, 0.5] {
            let w = if *l1 { l1_sum_witness(s, delta)? } else { linf_sum_witness(s, delta)? };
            let valid = w.is_valid(s);
            c.push(format!("{name} delta={delta} witness in A"), "valid".into(), format!("{valid}"), valid);
            let (d, _) = dist_to_pi(s, &w.x, &w.f)?;
            c.at_least(format!("{name} delta={delta} witness distance"), sqrt_2delta(delta) - 1e-8, d);
        }
    }
    Ok(())
}

/// The two listed symmetries of the diamond.
pub fn diamond_maps() -> [SignedPermutation; 2] {
    [
        SignedPermutation { perm: vec![1, 0, 2], signs: vec![1, 1, 1] },
        SignedPermutation { perm: vec![0, 1, 2], signs: vec![1, -1, 1] },
    ]
}

/// Polar vertices are facet normals computed in floating point, so "exact"
/// means agreement to this tolerance.
const PERMUTE_TOL: f64 = 1e-12;

fn permutes_vertices(g: &SignedPermutation, verts: &[Vector]) -> bool {
    verts.iter().all(|v| {
        let w = g.apply(v);
        verts.iter().any(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() <= PERMUTE_TOL))
    })
}

fn diamond(c: &mut Checks, seed: u64) -> Res {
    for (eps, delta) in [(0.6, 0.18), (0.5, 0.125), (0.8, 0.32)] {
        let d = NormedSpace::diamond(eps)?;
        let opts = UpperOptions { lower: lower_opts(seed), ..UpperOptions::with_mesh(0.05) };
        let est = phi_upper_certified_with(&d, delta, false, &opts)?;
        let cap = sqrt_2delta(delta);
        c.push(
            format!("eps={eps} delta={delta} strict gap"),
            format!("upper < {cap:.9}"),
            format!("{:.9} (margin {:.9})", est.upper, est.margin()),
            est.upper < cap && est.margin() > 0.0,
        );
    }
    for eps in [0.25, 0.5, 0.75] {
        let d = NormedSpace::diamond(eps)?;
        let p = d.polytope().expect("diamond ball");
        let pp = polar(&polar(p)?)?;
        let same = pp.same_vertex_set(p, 1e-9);
        c.push(format!("eps={eps} bipolar"), "same vertex set".into(), format!("{same}"), same);
        let dual = d.dual_space()?;
        let dual_verts = dual.ball_vertices().expect("dual ball");
        for (i, g) in diamond_maps().iter().enumerate() {
            let ok = permutes_vertices(g, p.vertices()) && permutes_vertices(g, dual_verts);
            c.push(format!("eps={eps} map {} permutes vertices", i + 1), "exact (1e-12)".into(), format!("{ok}"), ok);
        }
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let (a, b) = (i as f64 / 4.5 - 1.0, j as f64 / 4.5 - 1.0);
                worst = worst.max((d.norm_raw(&[a, b, 0.0]) - a.abs().max(b.abs())).abs());
            }
        }
        c.at_most(format!("eps={eps} flat slice is sup norm"), 1e-9, worst);
        c.close(format!("eps={eps} norm of (0,0,eps/2)"), 2.0 * eps / 3.0, d.norm_raw(&[0.0, 0.0, eps / 2.0]), 1e-9);
        c.close(format!("eps={eps} dual norm of (0,0,eps)"), 0.75 * eps, d.dual_norm_raw(&[0.0, 0.0, eps]), 1e-9);
        let a2 = &diamond_generators(eps)[1];
        c.close(format!("eps={eps} generator on sphere"), 1.0, d.norm_raw(a2), 1e-9);
    }
    Ok(())
}

fn hexagon() -> bpb_core::Result<NormedSpace> {
    let v = [[1.0, 0.0], [0.5, 1.0], [-0.5, 1.0]]
        .iter()
        .flat_map(|p| [Vector::from(p.to_vec()), Vector::from(vec![-p[0], -p[1]])])
        .collect();
    NormedSpace::polytopal(v)
}

fn duality(c: &mut Checks, seed: u64) -> Res {
    let mesh = 0.05;
    for (name, s) in [("linf2", NormedSpace::lp(f64::INFINITY, 2)?), ("hexagon", hexagon()?)] {
        let d = s.dual_space()?;
        for delta in [0.3, 0.8] {
            let opts = UpperOptions { lower: lower_opts(seed), ..UpperOptions::with_mesh(mesh) };
            let a = phi_upper_certified_with(&s, delta, false, &opts)?;
            let b = phi_upper_certified_with(&d, delta, false, &opts)?;
            // Equal values: each bracket must meet the other.
            let gap = (a.lower - b.upper).max(b.lower - a.upper);
            c.at_most(format!("{name} delta={delta} brackets overlap"), 1e-8, gap);
        }
    }
    Ok(())
}

/// Generic checks for a user-supplied space.
fn space_checks(c: &mut Checks, spec: &SpaceSpec, seed: u64) {
    let s = match spec.build() {
        Ok(s) => s,
        Err(e) => return c.error("spec".into(), e),
    };
    c.push("spec".into(), "parses".into(), s.label(), true);
    match spec.check_declared_vertices(&s) {
        Ok(()) => c.push("declared vertices".into(), "match".into(), "match".into(), true),
        Err(e) => c.push("declared vertices".into(), "match".into(), e, false),
    }
    if let Some(p) = s.polytope() {
        match polar(p).and_then(|q| polar(&q)) {
            Ok(pp) => {
                let same = pp.same_vertex_set(p, 1e-9);
                c.push("bipolar".into(), "same vertex set".into(), format!("{same}"), same);
            }
            Err(e) => c.error("bipolar".into(), e),
        }
    }
    let solver = match PiSolver::new(&s) {
        Ok(solver) => solver,
        Err(e) => return c.error("distance solver".into(), e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mut f: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let (nx, nf) = (s.norm_raw(&x).max(1e-300), s.dual_norm_raw(&f).max(1e-300));
        let (rx, rf) = (rng.random::<f64>().sqrt(), rng.random::<f64>().sqrt());
        x.iter_mut().for_each(|v| *v *= rx / nx);
        f.iter_mut().for_each(|v| *v *= rf / nf);
        let delta = (1.0 - x.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>()).max(0.0);
        match solver.distance(&x, &f) {
            Ok(d) => worst = worst.max(d - sqrt_2delta(delta)),
            Err(e) => return c.error("cap".into(), e),
        }
    }
    c.at_most("cap on 2000 samples (distance - sqrt(2 delta))".into(), 1e-8, worst);
    match phi_lower_with(&s, 0.5, false, &lower_opts(seed)) {
        Ok(est) => c.at_least("floor delta=0.5".into(), 0.5 - 1e-6, est.lower),
        Err(e) => c.error("floor".into(), e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfile::parse;

    #[test]
    fn fast_suites_pass() {
        for suite in ["line", "l1sum", "linf2"] {
            let checks = run(suite, None).unwrap();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.pass, "{c:?}");
            }
        }
    }

    #[test]
    fn corrupted_vertices_fail_by_name() {
        let text = "bpb-space 1\nkind l1-2\nvertex 1 0\nvertex -1 0\nvertex 0 1\nvertex 0.1 -1\nvertex -0.1 1\n";
        let spec = parse(text).unwrap();
        let out = verify("space", Some(&spec)).unwrap();
        assert_eq!(out.code, EXIT_FAILED_CHECK);
        assert!(out.stdout.contains("FAIL  space/declared vertices"), "{}", out.stdout);
        let good = parse("bpb-space 1\nkind l1-2\nvertex 1 0\nvertex -1 0\nvertex 0 1\nvertex 0 -1\n").unwrap();
        assert_eq!(verify("space", Some(&good)).unwrap().code, 0);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run("nope", None), Err(CliError::Parse(_))));
    }
}
