//! Estimates of `Phi_X(delta)` and `Phi^S_X(delta)`: search-based lower
//! bounds, certified upper bounds, closed-form references and curves.

mod lower;
mod reference;
mod upper;

pub use lower::{phi_lower, phi_lower_with, LowerOptions, DEFAULT_BUDGET, DEFAULT_SEED};
pub use upper::{
    phi_upper_certified, phi_upper_certified_with, UpperOptions, DEFAULT_BOX_BUDGET, MAX_CERTIFIED_DELTA,
    MAX_CERTIFIED_DIM,
};
pub use reference::{
    a_set_shift_bound, a_set_shift_bound_as_printed, reference_phi, spherical_shift_bound, ReferenceCurve,
};

use crate::attainment::BpbPoint;
use crate::error::{BpbError, Result};

/// Slack allowed above the universal cap `sqrt(2 delta)`.
pub const CAP_TOL: f64 = 1e-8;

/// Bounds on one modulus value.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub spherical: bool,
    pub lower: f64,
    pub upper: f64,
    /// Pair realising `lower` (its distance to `Pi(X)` is `witness_distance`).
    pub witness: Option<BpbPoint>,
    pub witness_distance: f64,
    /// Covering radius of the certificate, when there is one.
    pub mesh: Option<f64>,
    /// `upper` comes from a completed certificate rather than the cap.
    pub certified: bool,
    /// The certificate could not beat `sqrt(2 delta)`.
    pub vacuous: bool,
    /// The certificate reached its mesh; otherwise it stopped on the budget
    /// and `upper` is sound but loose.
    pub resolved: bool,
    /// The branch-and-bound value before capping at `sqrt(2 delta)`.
    pub certificate_bound: Option<f64>,
    pub evaluations: u64,
}

impl ModulusEstimate {
    pub(crate) fn lower_only(delta: f64, spherical: bool, lower: f64, witness: BpbPoint, evaluations: u64) -> Self {
        Self {
            delta,
            spherical,
            lower,
            upper: sqrt_2delta(delta),
            witness: Some(witness),
            witness_distance: lower,
            mesh: None,
            certified: false,
            vacuous: false,
            resolved: false,
            certificate_bound: None,
            evaluations,
        }
    }

    /// `sqrt(2 delta) - upper`; positive exactly when the certificate shows a
    /// strict gap below the universal cap.
    pub fn margin(&self) -> f64 {
        sqrt_2delta(self.delta) - self.upper
    }

    /// Combines a lower-side and an upper-side estimate of the same value.
    pub fn merge(lower: &ModulusEstimate, upper: &ModulusEstimate) -> ModulusEstimate {
        let mut out = upper.clone();
        if lower.lower > out.lower {
            out.lower = lower.lower;
            out.witness = lower.witness.clone();
            out.witness_distance = lower.witness_distance;
        }
        out.evaluations = lower.evaluations + upper.evaluations;
        out
    }
}

pub fn sqrt_2delta(delta: f64) -> f64 {
    (2.0 * delta).sqrt()
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 2.0 {
        Ok(())
    } else {
        Err(BpbError::OutOfDomain(format!("delta = {delta} outside (0, 2)")))
    }
}

/// How [`phi_curve`] treats each grid point.
#[derive(Debug, Clone)]
pub struct CurveOptions {
    /// Certify upper bounds with this mesh where supported; `None` reports
    /// only search lower bounds (capped by `sqrt(2 delta)`).
    pub mesh: Option<f64>,
    pub lower: LowerOptions,
    pub box_budget: u64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { mesh: None, lower: LowerOptions::default(), box_budget: DEFAULT_BOX_BUDGET }
    }
}

/// Estimates over a grid of `delta` values. Points where certification is
/// unsupported fall back to lower bounds only.
///
/// Both moduli are non-decreasing in `delta`, so a lower bound at `delta`
/// holds at every larger grid point and an upper bound at every smaller one;
/// the bounds are tightened accordingly after the pointwise runs.
pub fn phi_curve(
    space: &crate::spaces::NormedSpace,
    deltas: &[f64],
    spherical: bool,
    opts: &CurveOptions,
) -> Result<Vec<ModulusEstimate>> {
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        check_delta(delta)?;
        let certifiable = delta <= MAX_CERTIFIED_DELTA
            && space.dim() <= MAX_CERTIFIED_DIM
            && (space.ball().is_some() || space.is_euclidean());
        let est = match opts.mesh {
            Some(mesh) if certifiable => {
                let o = UpperOptions { mesh, budget: opts.box_budget, lower: opts.lower.clone() };
                phi_upper_certified_with(space, delta, spherical, &o)?
            }
            _ => phi_lower_with(space, delta, spherical, &opts.lower)?,
        };
        out.push(est);
    }
    let mut running = f64::NEG_INFINITY;
    for &i in &order {
        running = running.max(out[i].lower);
        out[i].lower = running;
    }
    let mut running = f64::INFINITY;
    for &i in order.iter().rev() {
        running = running.min(out[i].upper);
        out[i].upper = running.max(out[i].lower);
    }
    Ok(out)
}
