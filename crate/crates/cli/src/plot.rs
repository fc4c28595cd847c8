//! Modulus curves over a grid of `delta`, as CSV or SVG.

use std::fmt::Write as _;

use bpb_core::modulus::{phi_curve, reference_phi, CurveOptions, LowerOptions, DEFAULT_BOX_BUDGET};
use bpb_core::spaces::{NormedSpace, SpaceKind};
use serde_json::json;

use crate::record::ResultRecord;
use crate::specfile::SpaceSpec;
use crate::{CliError, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotFormat {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone)]
pub struct PlotArgs {
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub spherical: bool,
    /// Certify upper bounds with this mesh; otherwise the upper column is
    /// the universal cap.
    pub mesh: Option<f64>,
    pub budget: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub reference: Option<f64>,
}

/// `from, from + step, ...` up to `to`, rounded to 12 decimals so the CSV
/// shows the intended grid.
pub fn delta_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from > 0.0 && to < 2.0 && from <= to && step > 0.0) {
        return Err(CliError::Parse(format!("range {from}..{to} step {step} must lie inside (0, 2)")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// Parses `a..b`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Parse(format!("expected a range like 0.05..1.95, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Name of the closed-form curve that applies to `space`, if any.
pub fn reference_name(space: &NormedSpace) -> Option<&'static str> {
    match space.kind() {
        SpaceKind::Line => Some("line"),
        _ if space.is_euclidean() && space.dim() >= 2 => Some("euclidean"),
        // l_1^2 is l_inf^2 rotated by 45 degrees.
        SpaceKind::Lp { p, n: 2 } if p.is_infinite() || *p == 1.0 => Some("linf2"),
        _ => None,
    }
}

pub fn curve(space: &NormedSpace, a: &PlotArgs) -> Result<Vec<PlotRow>, CliError> {
    let deltas = delta_grid(a.from, a.to, a.step)?;
    let opts = CurveOptions {
        mesh: a.mesh,
        lower: LowerOptions { budget: a.budget, seed: a.seed, ..LowerOptions::default() },
        box_budget: DEFAULT_BOX_BUDGET,
    };
    let est = phi_curve(space, &deltas, a.spherical, &opts)?;
    let name = reference_name(space);
    Ok(est
        .into_iter()
        .map(|e| PlotRow {
            delta: e.delta,
            lower: e.lower,
            upper: e.upper,
            reference: name.and_then(|n| reference_phi(n, e.delta, a.spherical).ok()),
        })
        .collect())
}

pub fn csv(rows: &[PlotRow]) -> String {
    let mut s = String::from("delta,lower,upper,reference\n");
    for r in rows {
        let reference = r.reference.map(|v| format!("{v:.12}")).unwrap_or_default();
        let _ = writeln!(s, "{},{:.12},{:.12},{reference}", r.delta, r.lower, r.upper);
    }
    s
}

const SIZE: f64 = 600.0;
const PAD: f64 = 60.0;

/// Plot on the frame `[0, 2] x [0, 2]`: reference curve as a line, lower
/// bounds as dots, upper bounds as bars.
pub fn svg(rows: &[PlotRow], title: &str, reference: Option<(&str, bool)>) -> String {
    let span = SIZE - 2.0 * PAD;
    let px = |d: f64| PAD + d / 2.0 * span;
    let py = |v: f64| SIZE - PAD - v / 2.0 * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#, SIZE / 2.0, PAD / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 * 0.5;
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#ddd"/><text x="{x}" y="{ty}" text-anchor="middle">{t}</text>"##,
            x = px(t),
            y0 = py(0.0),
            y1 = py(2.0),
            ty = py(0.0) + 18.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#ddd"/><text x="{tx}" y="{ty}" text-anchor="end">{t}</text>"##,
            x0 = px(0.0),
            x1 = px(2.0),
            y = py(t),
            tx = px(0.0) - 6.0,
            ty = py(t) + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">delta</text>"#, SIZE / 2.0, SIZE - 15.0);
    if let Some((name, spherical)) = reference {
        let pts: Vec<String> = (1..400)
            .filter_map(|i| {
                let d = i as f64 / 200.0;
                reference_phi(name, d, spherical).ok().map(|v| format!("{:.2},{:.2}", px(d), py(v)))
            })
            .collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#888" stroke-width="2"/>"##, pts.join(" "));
    }
    for r in rows {
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#c33"/>"##,
            x0 = px(r.delta) - 4.0,
            x1 = px(r.delta) + 4.0,
            y = py(r.upper)
        );
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#236"/>"##, px(r.delta), py(r.lower));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn plot(spec: &SpaceSpec, a: &PlotArgs, format: PlotFormat) -> Result<Output, CliError> {
    let space = spec.load()?;
    let rows = curve(&space, a)?;
    let artifact = match format {
        PlotFormat::Csv => csv(&rows),
        PlotFormat::Svg => {
            let which = if a.spherical { "Phi^S" } else { "Phi" };
            let title = format!("{which} for {}", space.label());
            svg(&rows, &title, reference_name(&space).map(|n| (n, a.spherical)))
        }
    };
    // Summary on stdout only when the artifact goes to a file.
    let record = ResultRecord::new(
        "plot",
        Some(spec),
        json!({
            "from": a.from, "to": a.to, "step": a.step, "spherical": a.spherical,
            "mesh": a.mesh, "budget": a.budget, "seed": a.seed,
        }),
        json!({ "points": rows.len(), "max_reference_gap": max_gap(&rows) }),
    );
    Ok(Output { stdout: record.to_json() + "\n", code: 0, artifact: Some(artifact) })
}

/// Largest `|lower - reference|` over rows with a reference.
pub fn max_gap(rows: &[PlotRow]) -> Option<f64> {
    rows.iter().filter_map(|r| r.reference.map(|v| (r.lower - v).abs())).reduce(f64::max)
}
