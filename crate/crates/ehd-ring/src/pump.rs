//! Empirical pump model.
//!
//! The pump is characterized by bench measurements only: generated
//! pressure and flow rate are quadratic in the drive voltage. The
//! quadratics have no constant term, so a de-energized pump is exactly
//! inert. `fit_quadratic` recovers coefficients from measured
//! voltage/value pairs for recalibration against new hardware.

use crate::error::{Error, Result};

/// Voltage-to-output model of one pump assembly.
///
/// `pump_pressure` evaluates `pressure_scale * (a_p*v^2 - b_p*v)` and
/// `pump_flow` evaluates `flow_scale * (a_q*v^2 + b_q*v)` with `v` in
/// kilovolts. The scales convert the raw bench units to Pa and m^3/s.
/// `c_p` and `c_q` are the per-assembly calibration factors applied to
/// single-electrode-pair measurements when ingesting raw bench data via
/// [`apply_empirical_scaling`]; the default polynomials are already
/// whole-assembly totals, so the factors are not applied again.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpModel {
    pub a_p: f64,
    pub b_p: f64,
    pub a_q: f64,
    pub b_q: f64,
    pub c_p: f64,
    pub c_q: f64,
    /// Pa per raw pressure unit.
    pub pressure_scale: f64,
    /// m^3/s per raw flow unit. The default reads raw flow as mL/min.
    pub flow_scale: f64,
}

impl Default for PumpModel {
    fn default() -> Self {
        PumpModel {
            a_p: 2.152,
            b_p: 2.031,
            a_q: 0.0076,
            b_q: 0.0167,
            c_p: 15.0,
            c_q: 11.0,
            pressure_scale: 1.0,
            flow_scale: 1.667e-8,
        }
    }
}

impl PumpModel {
    /// Checks the field invariants, reporting the offending field by name.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("a_p", self.a_p),
            ("b_p", self.b_p),
            ("a_q", self.a_q),
            ("b_q", self.b_q),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("pump coefficient {name} must be finite, got {v}")));
            }
        }
        let positive = [
            ("c_p", self.c_p),
            ("c_q", self.c_q),
            ("pressure_scale", self.pressure_scale),
            ("flow_scale", self.flow_scale),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("pump {name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn check_voltage(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidInput(format!("pump voltage must be finite and non-negative, got {v} kV")));
    }
    Ok(())
}

/// Generated pressure in Pa at drive voltage `v` (kV).
///
/// The raw quadratic is negative between its roots, but a pump cannot
/// exert negative drive pressure, so the output clamps at zero. Clamping
/// happens before scaling, which keeps the result exact at v = 0.
pub fn pump_pressure(pump: &PumpModel, v: f64) -> Result<f64> {
    check_voltage(v)?;
    let raw = pump.a_p * v * v - pump.b_p * v;
    Ok(pump.pressure_scale * raw.max(0.0))
}

/// Generated flow rate in m^3/s at drive voltage `v` (kV).
pub fn pump_flow(pump: &PumpModel, v: f64) -> Result<f64> {
    check_voltage(v)?;
    Ok(pump.flow_scale * (pump.a_q * v * v + pump.b_q * v))
}

/// Scales a single-electrode-pair bench reading up to the full assembly.
pub fn apply_empirical_scaling(raw: f64, c: f64) -> Result<f64> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidInput(format!("empirical scaling factor must be finite and positive, got {c}")));
    }
    Ok(raw * c)
}

/// Least-squares fit of `y = a*v^2 + b*v` to measured samples.
///
/// Returns `(a, b, rms)` where rms is the root-mean-square residual over
/// the samples. Needs at least 3 samples spanning at least 2 distinct
/// nonzero voltages; the basis has no constant term, so samples at v = 0
/// carry no information. Normal equations with condition number above
/// 1e12 are rejected rather than solved.
pub fn fit_quadratic(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "quadratic fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    for &(v, y) in samples {
        if !v.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!("fit sample ({v}, {y}) is not finite")));
        }
    }
    let mut nonzero: Vec<f64> = samples.iter().map(|s| s.0).filter(|v| *v != 0.0).collect();
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nonzero.dedup();
    if nonzero.len() < 2 {
        return Err(Error::DegenerateData(
            "quadratic fit needs at least 2 distinct nonzero voltages".into(),
        ));
    }

    // Normal equations for the basis {v^2, v}.
    let (mut s4, mut s3, mut s2) = (0.0, 0.0, 0.0);
    let (mut r2, mut r1) = (0.0, 0.0);
    for &(v, y) in samples {
        let v2 = v * v;
        s4 += v2 * v2;
        s3 += v2 * v;
        s2 += v2;
        r2 += v2 * y;
        r1 += v * y;
    }
    // The normal matrix is symmetric positive semi-definite; its
    // eigenvalues come from the trace and determinant directly.
    let det = s4 * s2 - s3 * s3;
    let tr = s4 + s2;
    let disc = ((s4 - s2) * (s4 - s2) + 4.0 * s3 * s3).sqrt();
    let lo = 0.5 * (tr - disc);
    let hi = 0.5 * (tr + disc);
    if !(lo > 0.0) || hi / lo > 1e12 {
        return Err(Error::DegenerateData(format!(
            "normal equations are ill-conditioned (condition number {:e})",
            if lo > 0.0 { hi / lo } else { f64::INFINITY }
        )));
    }
    let a = (r2 * s2 - r1 * s3) / det;
    let b = (r1 * s4 - r2 * s3) / det;

    let mut ss = 0.0;
    for &(v, y) in samples {
        let e = y - (a * v * v + b * v);
        ss += e * e;
    }
    let rms = (ss / samples.len() as f64).sqrt();
    Ok((a, b, rms))
}
