//! The nine acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p bpb-cli --test acceptance`.

use std::time::{Duration, Instant};

use bpb_cli::plot::{plot, PlotArgs, PlotFormat};
use bpb_cli::specfile::resolve;
use bpb_cli::verify::diamond_maps;
use bpb_core::attainment::{dist_to_pi, l1_sum_witness, linf_sum_witness, PiSolver};
use bpb_core::geometry::{polar, Vector};
use bpb_core::modulus::{
    phi_curve, phi_lower, phi_upper_certified, reference_phi, sqrt_2delta, CurveOptions, UpperOptions,
    DEFAULT_BUDGET, DEFAULT_SEED,
};
use bpb_core::spaces::{diamond_generators, NormedSpace};
use bpb_core::squareness::{containment_check, defect_of, squareness_defect, DEFAULT_MARGIN};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn linf2() -> NormedSpace {
    NormedSpace::lp(f64::INFINITY, 2).unwrap()
}

fn hexagon() -> NormedSpace {
    let v = [[1.0, 0.0], [0.5, 1.0], [-0.5, 1.0]]
        .iter()
        .flat_map(|p| [Vector::from(p.to_vec()), Vector::from(vec![-p[0], -p[1]])])
        .collect();
    NormedSpace::polytopal(v).unwrap()
}

/// Spaces with an exact distance solver, for the sampled invariants.
fn catalog_spaces() -> Vec<(&'static str, NormedSpace)> {
    let line = NormedSpace::line;
    vec![
        ("line", line()),
        ("linf2", linf2()),
        ("l1-2", NormedSpace::lp(1.0, 2).unwrap()),
        ("euclidean2", NormedSpace::euclidean(2).unwrap()),
        ("euclidean3", NormedSpace::euclidean(3).unwrap()),
        ("l1sum(line,line)", NormedSpace::l1_sum(vec![line(), line()]).unwrap()),
        ("linfsum(line,l1-2)", NormedSpace::linf_sum(vec![line(), NormedSpace::lp(1.0, 2).unwrap()]).unwrap()),
        ("diamond(0.5)", NormedSpace::diamond(0.5).unwrap()),
        ("hexagon", hexagon()),
    ]
}

fn criterion_1() -> Outcome {
    let s = linf2();
    let mut worst_lower: f64 = 0.0;
    let mut worst_upper = f64::NEG_INFINITY;
    for spherical in [false, true] {
        for delta in [0.1, 0.3, 0.5, 1.0, 1.5, 1.9] {
            let h = if delta <= 1.0 { 0.02 } else { 0.05 };
            let cap = sqrt_2delta(delta);
            let low = phi_lower(&s, delta, spherical, DEFAULT_BUDGET).map_err(e)?;
            ensure(low.lower >= cap - 1e-3, || format!("lower {} at delta {delta}", low.lower))?;
            let up = phi_upper_certified(&s, delta, spherical, h).map_err(e)?;
            let raw = up.certificate_bound.unwrap_or(f64::INFINITY);
            ensure(up.upper <= cap + h + 1e-6 && raw <= cap + h + 1e-6, || {
                format!("upper {} (certificate {raw}) at delta {delta}, spherical {spherical}", up.upper)
            })?;
            worst_lower = worst_lower.max(cap - low.lower);
            worst_upper = worst_upper.max(raw - cap - h);
        }
    }
    Ok(format!("max cap - lower {worst_lower:.2e}, max certificate - cap - h {worst_upper:.2e}"))
}

fn criterion_2() -> Outcome {
    let s = NormedSpace::line();
    let mut worst: f64 = 0.0;
    for delta in [0.2f64, 0.7, 1.0, 1.2, 1.8] {
        let expected = if delta <= 1.0 { delta } else { (delta - 1.0).sqrt() + 1.0 };
        let est = phi_lower(&s, delta, false, DEFAULT_BUDGET).map_err(e)?;
        ensure((est.lower - expected).abs() <= 1e-6, || format!("phi({delta}) = {} vs {expected}", est.lower))?;
        worst = worst.max((est.lower - expected).abs());
        let sph = phi_lower(&s, delta, true, DEFAULT_BUDGET).map_err(e)?;
        ensure(sph.lower == 0.0, || format!("spherical lower {} at {delta}", sph.lower))?;
        // The sphere is {-1, 1}: every admissible pair is at distance exactly 0.
        let solver = PiSolver::new(&s).map_err(e)?;
        for x in [-1.0, 1.0] {
            for f in [-1.0, 1.0] {
                if x * f >= 1.0 - delta {
                    let d = solver.distance(&[x], &[f]).map_err(e)?;
                    ensure(d == 0.0, || format!("sphere pair ({x}, {f}) at distance {d}"))?;
                }
            }
        }
    }
    Ok(format!("max |phi - reference| {worst:.2e}, spherical modulus exactly 0"))
}

fn criterion_3() -> Outcome {
    let h = NormedSpace::euclidean(2).unwrap();
    let mut worst: f64 = 0.0;
    for (spherical, deltas) in [(true, &[0.2, 0.5, 0.9][..]), (false, &[0.2, 0.5, 0.9, 1.2, 1.6][..])] {
        for &delta in deltas {
            let expected = reference_phi("euclidean", delta, spherical).map_err(e)?;
            let est = phi_lower(&h, delta, spherical, DEFAULT_BUDGET).map_err(e)?;
            let gap = (est.lower - expected).abs();
            ensure(gap <= 5e-3, || format!("delta {delta} spherical {spherical}: {} vs {expected}", est.lower))?;
            worst = worst.max(gap);
        }
    }
    // The certified side must not undercut the closed form.
    for (delta, spherical) in [(0.5, false), (0.5, true), (1.2, false)] {
        let up = phi_upper_certified(&h, delta, spherical, 0.02).map_err(e)?;
        let expected = reference_phi("euclidean", delta, spherical).map_err(e)?;
        ensure(up.upper >= expected - 1e-8 && up.upper <= expected + 0.02 + 1e-6, || {
            format!("certified upper {} vs {expected} at {delta}", up.upper)
        })?;
    }
    Ok(format!("max |estimate - closed form| {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let line = NormedSpace::line;
    let cases = [
        ("l1^2", NormedSpace::l1_sum(vec![line(), line()]).unwrap(), true),
        ("l1^3", NormedSpace::l1_sum(vec![line(), NormedSpace::lp(1.0, 2).unwrap()]).unwrap(), true),
        ("linf^2", NormedSpace::linf_sum(vec![line(), line()]).unwrap(), false),
        ("linf^3", NormedSpace::linf_sum(vec![line(), linf2()]).unwrap(), false),
    ];
    let mut worst: f64 = 0.0;
    for (name, s, l1) in &cases {
        for delta in [0.1, 0.3, 0.5] {
            let cap = sqrt_2delta(delta);
            let w = if *l1 { l1_sum_witness(s, delta) } else { linf_sum_witness(s, delta) }.map_err(e)?;
            ensure(w.is_valid(s), || format!("{name}: witness not in A at {delta}"))?;
            let (d, _) = dist_to_pi(s, &w.x, &w.f).map_err(e)?;
            ensure(d >= cap - 1e-8, || format!("{name}: witness distance {d} < {cap} at {delta}"))?;
            let est = phi_lower(s, delta, false, DEFAULT_BUDGET).map_err(e)?;
            ensure((est.lower - cap).abs() <= 1e-8, || format!("{name}: lower {} vs {cap}", est.lower))?;
            worst = worst.max(cap - d);
        }
    }
    Ok(format!("max cap - witness distance {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    for (eps, delta) in [(0.6, 0.18), (0.5, 0.125), (0.8, 0.32)] {
        let start = Instant::now();
        let d = NormedSpace::diamond(eps).map_err(e)?;
        let est = phi_upper_certified(&d, delta, false, 0.05).map_err(e)?;
        let cap = sqrt_2delta(delta);
        let margin = est.margin();
        ensure(est.upper < cap && margin > 0.0 && est.resolved, || {
            format!("eps {eps}, delta {delta}: upper {} cap {cap} resolved {}", est.upper, est.resolved)
        })?;
        ensure(start.elapsed() < Duration::from_secs(30 * 60), || "over the time budget".into())?;
        lines.push(format!(
            "eps={eps} delta={delta}: {:.4} <= phi <= {:.4} < {:.4}, margin {margin:.4} ({:.1}s)",
            est.lower,
            est.upper,
            cap,
            start.elapsed().as_secs_f64()
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_6() -> Outcome {
    for eps in [0.25, 0.5, 0.75] {
        let d = NormedSpace::diamond(eps).map_err(e)?;
        let p = d.polytope().unwrap();
        ensure(polar(&polar(p).map_err(e)?).map_err(e)?.same_vertex_set(p, 1e-9), || format!("bipolar at {eps}"))?;
        let dual = d.dual_space().map_err(e)?;
        for (i, g) in diamond_maps().iter().enumerate() {
            for verts in [p.vertices(), dual.ball_vertices().unwrap()] {
                let ok = verts.iter().all(|v| {
                    let w = g.apply(v);
                    verts.iter().any(|u| u.iter().zip(&w).all(|(a, b)| (a - b).abs() <= 1e-12))
                });
                ensure(ok, || format!("map {} does not permute the vertices at {eps}", i + 1))?;
            }
        }
        for i in 0..=20 {
            for j in 0..=20 {
                let (a, b) = (i as f64 / 10.0 - 1.0, j as f64 / 10.0 - 1.0);
                let n = d.norm_raw(&[a, b, 0.0]);
                ensure((n - a.abs().max(b.abs())).abs() <= 1e-9, || format!("norm({a}, {b}, 0) = {n}"))?;
            }
        }
        let n = d.norm_raw(&[0.0, 0.0, eps / 2.0]);
        ensure((n - 2.0 * eps / 3.0).abs() <= 1e-9, || format!("norm of (0,0,eps/2) = {n}"))?;
        let m = d.dual_norm_raw(&[0.0, 0.0, eps]);
        ensure((m - 0.75 * eps).abs() <= 1e-9, || format!("dual norm of (0,0,eps) = {m}"))?;
        ensure((d.norm_raw(&diamond_generators(eps)[1]) - 1.0).abs() <= 1e-9, || "generator off the sphere".into())?;
    }
    Ok("bipolar, both maps, flat slice and reference norms at eps 0.25, 0.5, 0.75".into())
}

/// A point of each unit ball, radius drawn so both the interior and the
/// sphere are exercised.
fn sample_pair(s: &NormedSpace, rng: &mut ChaCha8Rng, spherical: bool) -> (Vec<f64>, Vec<f64>) {
    let n = s.dim();
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let (nx, nf) = (s.norm_raw(&x), s.dual_norm_raw(&f));
        if nx < 1e-9 || nf < 1e-9 {
            continue;
        }
        let (rx, rf) = if spherical { (1.0, 1.0) } else { (rng.random::<f64>().sqrt(), rng.random::<f64>().sqrt()) };
        return (x.iter().map(|c| c * rx / nx).collect(), f.iter().map(|c| c * rf / nf).collect());
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    // Cap on 10^4 samples per space: each pair lies in A(delta) for
    // delta = 1 - f(x), the smallest admissible value.
    let mut worst_cap = f64::NEG_INFINITY;
    let mut worst_lip = f64::NEG_INFINITY;
    for (name, s) in catalog_spaces() {
        let solver = PiSolver::new(&s).map_err(e)?;
        for k in 0..10_000 {
            let (x, f) = sample_pair(&s, &mut rng, k % 2 == 0);
            let delta = (1.0 - x.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>()).max(0.0);
            let d = solver.distance(&x, &f).map_err(e)?;
            ensure(d <= sqrt_2delta(delta) + 1e-8, || format!("{name}: distance {d} above cap at {delta}"))?;
            worst_cap = worst_cap.max(d - sqrt_2delta(delta));
        }
        for _ in 0..2_000 {
            let (x, f) = sample_pair(&s, &mut rng, false);
            let (y, g) = sample_pair(&s, &mut rng, false);
            let t = rng.random::<f64>() * 0.2;
            let y: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + t * (b - a)).collect();
            let g: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + t * (b - a)).collect();
            let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let df: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a - b).collect();
            let step = s.norm_raw(&dx).max(s.dual_norm_raw(&df));
            let change = (solver.distance(&x, &f).map_err(e)? - solver.distance(&y, &g).map_err(e)?).abs();
            ensure(change <= step + 1e-9, || format!("{name}: Lipschitz {change} > {step}"))?;
            worst_lip = worst_lip.max(change - step);
        }
    }
    // Ordering, floor and duality on the planar polytopes and the plane.
    let h = 0.05;
    let planar = [("linf2", linf2()), ("hexagon", hexagon()), ("euclidean2", NormedSpace::euclidean(2).unwrap())];
    for (name, s) in &planar {
        for delta in [0.2, 0.6, 1.0, 1.4] {
            let full = phi_upper_certified(s, delta, false, h).map_err(e)?;
            let sph = phi_lower(s, delta, true, DEFAULT_BUDGET).map_err(e)?;
            ensure(sph.lower <= full.upper + 2.0 * h, || format!("{name}: spherical above full at {delta}"))?;
            ensure(full.lower <= full.upper, || format!("{name}: bracket inverted at {delta}"))?;
            if delta <= 1.0 {
                ensure(full.lower >= delta - 1e-6, || format!("{name}: floor {} < {delta}", full.lower))?;
            }
            if s.ball().is_some() {
                let dual = phi_upper_certified(&s.dual_space().map_err(e)?, delta, false, h).map_err(e)?;
                let gap = (full.lower - dual.upper).max(dual.lower - full.upper);
                ensure(gap <= 1e-8, || format!("{name}: dual brackets apart by {gap} at {delta}"))?;
            }
        }
    }
    for (name, s) in catalog_spaces() {
        for delta in [0.1, 0.5, 1.0] {
            let est = phi_lower(&s, delta, false, DEFAULT_BUDGET).map_err(e)?;
            ensure(est.lower >= delta - 1e-6, || format!("{name}: floor {} < {delta}", est.lower))?;
        }
    }
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 * 0.2).collect();
    let opts = CurveOptions { mesh: Some(h), ..CurveOptions::default() };
    for spherical in [false, true] {
        let curve = phi_curve(&hexagon(), &grid, spherical, &opts).map_err(e)?;
        for w in curve.windows(2) {
            ensure(w[0].lower <= w[1].lower + 1e-8 && w[0].upper <= w[1].upper + 1e-8, || {
                format!("curve not monotone at {}", w[1].delta)
            })?;
        }
    }
    Ok(format!("cap slack {worst_cap:.2e}, Lipschitz slack {worst_lip:.2e}; ordering, floor, duality and monotonicity hold"))
}

fn criterion_8() -> Outcome {
    let mut found = Vec::new();
    for (name, s) in [("linf2", linf2()), ("l1-2", NormedSpace::lp(1.0, 2).unwrap()), ("diamond(0.5)", NormedSpace::diamond(0.5).unwrap())] {
        let w = squareness_defect(&s, 100_000).map_err(e)?;
        ensure(w.defect.abs() <= 1e-9, || format!("{name}: defect {}", w.defect))?;
        found.push(format!("{name} u={:?} v={:?}", w.u.coords(), w.v.coords()));
    }
    let e2 = NormedSpace::euclidean(2).unwrap();
    let steps = 720;
    let mut grid = f64::INFINITY;
    for i in 0..steps {
        let a = std::f64::consts::TAU * i as f64 / steps as f64;
        for j in 0..steps {
            let b = std::f64::consts::TAU * j as f64 / steps as f64;
            grid = grid.min(defect_of(&e2, &[a.cos(), a.sin()], &[b.cos(), b.sin()]));
        }
    }
    let w = squareness_defect(&e2, 100_000).map_err(e)?;
    ensure((w.defect - grid).abs() <= 1e-4 && (w.defect - (2.0 - 2f64.sqrt())).abs() <= 1e-4, || {
        format!("euclidean defect {} vs grid {grid}", w.defect)
    })?;
    let upper = UpperOptions::with_mesh(0.02);
    let r = containment_check(&e2, &[0.1, 0.25, 0.4], DEFAULT_MARGIN, &upper).map_err(e)?;
    ensure(r.hypothesis && r.passed() && r.rows.len() == 3, || format!("euclidean containment: {r:?}"))?;
    let d = NormedSpace::diamond(0.6).unwrap();
    let r = containment_check(&d, &[0.18], DEFAULT_MARGIN, &UpperOptions::with_mesh(0.05)).map_err(e)?;
    ensure(!r.hypothesis && r.strict_despite_square == vec![0.18], || format!("diamond containment: {r:?}"))?;
    Ok(format!(
        "{}; euclidean defect {:.6} (grid {grid:.6}); diamond(0.6): dual has a square, yet upper {:.4} < {:.4}",
        found.join("; "),
        w.defect,
        r.rows[0].upper,
        r.rows[0].cap
    ))
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["line", "euclidean2", "linf2"] {
        for spherical in [false, true] {
            let args = PlotArgs {
                from: 0.05,
                to: 1.95,
                step: 0.05,
                spherical,
                mesh: None,
                budget: DEFAULT_BUDGET,
                seed: DEFAULT_SEED,
            };
            let csv = plot(&resolve(name).map_err(e)?, &args, PlotFormat::Csv).map_err(e)?.artifact.unwrap();
            let mut rows = csv.lines();
            ensure(rows.next() == Some("delta,lower,upper,reference"), || "bad header".into())?;
            let mut count = 0;
            for row in rows {
                let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
                let gap = (cols[1] - cols[3]).abs();
                ensure(gap <= 5e-3, || format!("{name} spherical {spherical} delta {}: gap {gap}", cols[0]))?;
                worst = worst.max(gap);
                count += 1;
            }
            ensure(count == 39, || format!("{count} rows"))?;
        }
    }
    Ok(format!("39 points per curve, max |lower - reference| {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 square sharpness", criterion_1),
        ("2 real line", criterion_2),
        ("3 Euclidean plane", criterion_3),
        ("4 sums attain the cap", criterion_4),
        ("5 diamond strict gap", criterion_5),
        ("6 diamond geometry", criterion_6),
        ("7 universal invariants", criterion_7),
        ("8 squareness", criterion_8),
        ("9 figure curves", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
