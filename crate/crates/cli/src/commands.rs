//! `modulus`, `squareness` and `dual`.

use std::fmt::Write as _;

use bpb_core::modulus::{
    phi_lower_with, phi_upper_certified_with, sqrt_2delta, LowerOptions, ModulusEstimate, UpperOptions,
    MAX_CERTIFIED_DELTA, MAX_CERTIFIED_DIM,
};
use bpb_core::spaces::NormedSpace;
use bpb_core::squareness::{is_uniformly_non_square, squareness_defect, SquareWitness};
use serde_json::json;

use crate::record::ResultRecord;
use crate::specfile::SpaceSpec;
use crate::{fmt_vec, CliError, Output, EXIT_VACUOUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Default certificate mesh: finer in the plane, coarser in space.
pub fn default_mesh(dim: usize) -> f64 {
    if dim <= 2 {
        0.02
    } else {
        0.05
    }
}

/// Whether the branch-and-bound certificate applies.
pub fn certifiable(space: &NormedSpace, delta: f64) -> bool {
    delta <= MAX_CERTIFIED_DELTA && space.dim() <= MAX_CERTIFIED_DIM && (space.ball().is_some() || space.is_euclidean())
}

#[derive(Debug, Clone)]
pub struct ModulusArgs {
    pub delta: f64,
    pub spherical: bool,
    pub mesh: Option<f64>,
    pub budget: u64,
    pub seed: u64,
}

/// Lower and (where possible) certified upper bound at one `delta`.
pub fn estimate(space: &NormedSpace, a: &ModulusArgs) -> Result<ModulusEstimate, CliError> {
    let lower = LowerOptions { budget: a.budget, seed: a.seed, ..LowerOptions::default() };
    if certifiable(space, a.delta) {
        let mesh = a.mesh.unwrap_or_else(|| default_mesh(space.dim()));
        let opts = UpperOptions { lower, ..UpperOptions::with_mesh(mesh) };
        Ok(phi_upper_certified_with(space, a.delta, a.spherical, &opts)?)
    } else {
        Ok(phi_lower_with(space, a.delta, a.spherical, &lower)?)
    }
}

/// A lower bound this close to the cap shows the cap is the value.
pub const CAP_REACHED: f64 = 1e-6;

/// The certificate did not beat the cap although no lower bound reaches it:
/// a finer mesh is needed. A vacuous certificate is the right answer when
/// the lower bound meets the cap (as for the square).
pub fn mesh_too_coarse(est: &ModulusEstimate) -> bool {
    est.certified && est.vacuous && sqrt_2delta(est.delta) - est.lower > CAP_REACHED
}

pub fn modulus(spec: &SpaceSpec, a: &ModulusArgs, format: Format) -> Result<Output, CliError> {
    let space = spec.load()?;
    let est = estimate(&space, a)?;
    let code = if mesh_too_coarse(&est) { EXIT_VACUOUS } else { 0 };
    let witness = est.witness.as_ref().map(|w| json!({ "x": w.x.to_vec(), "f": w.f.to_vec() }));
    let record = ResultRecord::new(
        "modulus",
        Some(spec),
        json!({
            "delta": a.delta, "spherical": a.spherical, "mesh": est.mesh,
            "budget": a.budget, "seed": a.seed,
        }),
        json!({
            "lower": est.lower, "upper": est.upper, "cap": sqrt_2delta(a.delta), "margin": est.margin(),
            "certified": est.certified, "vacuous": est.vacuous, "resolved": est.resolved,
            "certificate_bound": est.certificate_bound, "witness": witness,
            "witness_distance": est.witness_distance, "evaluations": est.evaluations,
        }),
    );
    let json = record.to_json();
    let stdout = match format {
        Format::Json => json.clone() + "\n",
        Format::Text => modulus_text(&space, &est),
    };
    Ok(Output { stdout, code, artifact: Some(json) })
}

fn modulus_text(space: &NormedSpace, est: &ModulusEstimate) -> String {
    let mut s = String::new();
    let kind = if est.spherical { "spherical" } else { "non-spherical" };
    let _ = writeln!(s, "space        {}", space.label());
    let _ = writeln!(s, "delta        {} ({kind})", est.delta);
    let _ = writeln!(s, "lower        {:.9}", est.lower);
    match (est.certified, est.mesh) {
        (true, Some(h)) => {
            let status = if est.resolved { "certified" } else { "certified, budget exhausted" };
            let _ = writeln!(s, "upper        {:.9} ({status}, mesh {h})", est.upper);
            if let Some(b) = est.certificate_bound {
                let _ = writeln!(s, "certificate  {b:.9}");
            }
        }
        _ => {
            let _ = writeln!(s, "upper        {:.9} (universal cap only, not certified)", est.upper);
        }
    }
    let _ = writeln!(s, "cap          {:.9}", sqrt_2delta(est.delta));
    let _ = writeln!(s, "margin       {:.9}", est.margin());
    if mesh_too_coarse(est) {
        let _ = writeln!(s, "note         certificate is vacuous at this mesh; try a smaller --mesh");
    }
    if let Some(w) = &est.witness {
        let _ = writeln!(s, "witness x    {}", fmt_vec(&w.x));
        let _ = writeln!(s, "witness f    {}", fmt_vec(&w.f));
        let _ = writeln!(s, "pairing      {:.9}", w.pairing());
    }
    s
}

/// Below this the witness is reported as spanning an exact square.
pub const ZERO_DEFECT: f64 = 1e-9;

pub fn squareness(spec: &SpaceSpec, budget: u64, margin: f64, format: Format) -> Result<Output, CliError> {
    let space = spec.load()?;
    let w = squareness_defect(&space, budget)?;
    let basis = (w.defect <= ZERO_DEFECT).then(|| w.square_basis());
    let record = ResultRecord::new(
        "squareness",
        Some(spec),
        json!({ "budget": budget, "margin": margin }),
        json!({
            "defect": w.defect, "vertex_defect": w.vertex_defect, "u": w.u.to_vec(), "v": w.v.to_vec(),
            "uniformly_non_square": is_uniformly_non_square(w.defect, margin),
            "square_basis": basis.as_ref().map(|(a, b)| [a.to_vec(), b.to_vec()]),
        }),
    );
    let json = record.to_json();
    let stdout = match format {
        Format::Json => json.clone() + "\n",
        Format::Text => squareness_text(&space, &w, margin),
    };
    Ok(Output { stdout, code: 0, artifact: Some(json) })
}

fn squareness_text(space: &NormedSpace, w: &SquareWitness, margin: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "space        {}", space.label());
    let _ = writeln!(s, "defect       {:.9}", w.defect);
    if let Some(v) = w.vertex_defect {
        let _ = writeln!(s, "vertex pairs {v:.9}");
    }
    let _ = writeln!(s, "u            {}", fmt_vec(&w.u));
    let _ = writeln!(s, "v            {}", fmt_vec(&w.v));
    let _ = writeln!(s, "||u+v||      {:.9}", space.norm_raw(&w.u.add(&w.v)));
    let _ = writeln!(s, "||u-v||      {:.9}", space.norm_raw(&w.u.sub(&w.v)));
    if w.defect <= ZERO_DEFECT {
        let (a, b) = w.square_basis();
        let _ = writeln!(s, "square basis {} {}", fmt_vec(&a), fmt_vec(&b));
    } else {
        let verdict = if is_uniformly_non_square(w.defect, margin) { "yes" } else { "no" };
        let _ = writeln!(s, "uniformly non-square (margin {margin}): {verdict}");
    }
    s
}

/// The dual space as a space file, listing ball vertices when there are any.
pub fn dual(spec: &SpaceSpec) -> Result<Output, CliError> {
    let space = spec.load()?;
    let text = SpaceSpec::from_space(&space.dual_space()?, true).print();
    Ok(Output { stdout: text.clone(), code: 0, artifact: Some(text) })
}
