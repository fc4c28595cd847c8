//! Closed-form moduli of the line, the Euclidean plane and the square, and
//! the quantitative continuity bounds for the sets `A_X(delta)`.

use crate::error::{BpbError, Result};

/// A closed-form modulus curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    pub space_name: &'static str,
    pub formula: &'static str,
    pub spherical: bool,
    /// Open interval of validity in `delta`.
    pub domain: (f64, f64),
}

impl ReferenceCurve {
    pub fn new(name: &str, spherical: bool) -> Result<Self> {
        let (space_name, formula) = match (name, spherical) {
            ("line", false) => ("line", "delta for delta <= 1, sqrt(delta - 1) + 1 above"),
            ("line", true) => ("line", "0"),
            ("euclidean", false) => ("euclidean", "max(delta, sqrt(2 - sqrt(4 - 2 delta))) for delta <= 1, sqrt(delta) above"),
            ("euclidean", true) => ("euclidean", "sqrt(2 - sqrt(4 - 2 delta))"),
            ("linf2", _) => ("linf2", "sqrt(2 delta)"),
            _ => return Err(BpbError::UnknownSpace(format!("no reference curve for {name}"))),
        };
        Ok(Self { space_name, formula, spherical, domain: (0.0, 2.0) })
    }

    pub fn eval(&self, delta: f64) -> Result<f64> {
        reference_phi(self.space_name, delta, self.spherical)
    }
}

/// The known value of the modulus for `line`, `euclidean` (any dimension
/// at least two) and `linf2`, for `delta` in `(0, 2)`.
pub fn reference_phi(name: &str, delta: f64, spherical: bool) -> Result<f64> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(BpbError::OutOfDomain(format!("delta = {delta} outside (0, 2)")));
    }
    let hilbert_sphere = || (2.0 - (4.0 - 2.0 * delta).sqrt()).sqrt();
    match (name, spherical) {
        ("line", true) => Ok(0.0),
        ("line", false) if delta <= 1.0 => Ok(delta),
        ("line", false) => Ok((delta - 1.0).sqrt() + 1.0),
        ("euclidean", true) => Ok(hilbert_sphere()),
        ("euclidean", false) if delta <= 1.0 => Ok(delta.max(hilbert_sphere())),
        ("euclidean", false) => Ok(delta.sqrt()),
        ("linf2", _) => Ok((2.0 * delta).sqrt()),
        _ => Err(BpbError::UnknownSpace(format!("no reference curve for {name}"))),
    }
}

/// Upper bound on the distance from a point of `A_X(delta0)` to
/// `A_X(delta)`, `0 < delta <= delta0 < 2`, both in `(0, 1]` or both in
/// `[1, 2)`.
///
/// For the upper range this is `2 (delta0 - delta) / (delta0 - 1 +
/// sqrt(1 - 2 delta + delta delta0))`, which is twice the root
/// `lambda = (t + sqrt(1 - t delta - delta)) / (1 + t)` at `t = 1 - delta0`.
/// See [`a_set_shift_bound_as_printed`] for the smaller published variant.
pub fn a_set_shift_bound(delta: f64, delta0: f64) -> Result<f64> {
    check_order(delta, delta0)?;
    if delta == delta0 {
        return Ok(0.0);
    }
    if delta0 <= 1.0 {
        let (a, b) = ((1.0 - delta).sqrt(), (1.0 - delta0).sqrt());
        Ok(2.0 * (a - b) / (1.0 - b))
    } else if delta >= 1.0 {
        Ok(2.0 * (delta0 - delta) / (delta0 - 1.0 + (1.0 - 2.0 * delta + delta * delta0).sqrt()))
    } else {
        Err(BpbError::OutOfDomain(format!("delta = {delta} and delta0 = {delta0} straddle 1")))
    }
}

/// The upper-range bound with the factor `(2 - delta0) / delta0` as it is
/// usually stated. It is smaller than [`a_set_shift_bound`] for
/// `delta0 > 1` and is kept only for comparison.
pub fn a_set_shift_bound_as_printed(delta: f64, delta0: f64) -> Result<f64> {
    check_order(delta, delta0)?;
    if delta < 1.0 {
        return Err(BpbError::OutOfDomain(format!("delta = {delta} below 1")));
    }
    let corrected = a_set_shift_bound(delta, delta0)?;
    Ok(corrected * (2.0 - delta0) / delta0)
}

/// Upper bound on the distance from a point of `A^S_X(delta0)` to
/// `A^S_X(delta)`.
pub fn spherical_shift_bound(delta: f64, delta0: f64) -> Result<f64> {
    check_order(delta, delta0)?;
    if delta < 1.0 {
        Ok(4.0 * (delta0 - delta) / delta0)
    } else if 2.0 - (2.0 - delta0).sqrt() < delta {
        Ok(2.0 * (delta0 - delta) / (2.0 - delta))
    } else {
        Err(BpbError::OutOfDomain(format!(
            "delta = {delta} must exceed 2 - sqrt(2 - delta0) = {}",
            2.0 - (2.0 - delta0).sqrt()
        )))
    }
}

fn check_order(delta: f64, delta0: f64) -> Result<()> {
    if delta > 0.0 && delta <= delta0 && delta0 < 2.0 {
        Ok(())
    } else {
        Err(BpbError::OutOfDomain(format!("need 0 < delta <= delta0 < 2, got {delta}, {delta0}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(reference_phi("line", 0.3, false).unwrap(), 0.3);
        assert_eq!(reference_phi("line", 1.7, true).unwrap(), 0.0);
        assert_eq!(reference_phi("euclidean", 1.5, false).unwrap(), 1.5_f64.sqrt());
        assert_eq!(reference_phi("linf2", 0.5, true).unwrap(), 1.0);
        assert!((reference_phi("euclidean", 1.0, true).unwrap() - (2.0 - 2.0_f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!(matches!(reference_phi("line", 2.0, false), Err(BpbError::OutOfDomain(_))));
        assert!(matches!(reference_phi("diamond", 0.5, false), Err(BpbError::UnknownSpace(_))));
    }

    #[test]
    fn curves_are_continuous_at_one() {
        for (name, sph) in [("line", false), ("euclidean", false), ("euclidean", true)] {
            let c = ReferenceCurve::new(name, sph).unwrap();
            assert!((c.eval(1.0 - 1e-9).unwrap() - c.eval(1.0 + 1e-9).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn shift_bound_values() {
        // 2 (sqrt(1/2) - 1/2) / (1 - 1/2) = 4 (sqrt(1/2) - 1/2)
        let b = a_set_shift_bound(0.5, 0.75).unwrap();
        assert!((b - 4.0 * (0.5_f64.sqrt() - 0.5)).abs() < 1e-14);
        assert!((b - 0.828427).abs() < 1e-6);
        assert!(a_set_shift_bound(0.4, 0.4 + 1e-12).unwrap() < 1e-9);
        assert!(matches!(a_set_shift_bound(0.8, 1.2), Err(BpbError::OutOfDomain(_))));
        assert_eq!(spherical_shift_bound(0.25, 0.5).unwrap(), 2.0);
        assert!((spherical_shift_bound(1.5, 1.6).unwrap() - 0.4).abs() < 1e-12);
        assert!(matches!(spherical_shift_bound(1.1, 1.9), Err(BpbError::OutOfDomain(_))));
    }

    #[test]
    fn upper_range_bound_is_twice_the_root() {
        // lambda solves (1 + t) l^2 - 2 t l + (t - 1 + delta) = 0 at t = 1 - delta0
        for (delta, delta0) in [(1.2, 1.5), (1.0, 1.9), (1.4, 1.45)] {
            let t: f64 = 1.0 - delta0;
            let b = a_set_shift_bound(delta, delta0).unwrap();
            let l = b / 2.0;
            let residual = (1.0 + t) * l * l - 2.0 * t * l + (t - 1.0 + delta);
            assert!(residual.abs() < 1e-12, "{residual}");
            assert!((0.0..=1.0).contains(&l));
            assert!(a_set_shift_bound_as_printed(delta, delta0).unwrap() < b);
        }
        // monotone in the gap
        let a = a_set_shift_bound(1.2, 1.3).unwrap();
        let b = a_set_shift_bound(1.2, 1.5).unwrap();
        assert!(0.0 < a && a < b);
    }
}
