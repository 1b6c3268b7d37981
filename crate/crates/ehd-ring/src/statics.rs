//! Quasi-static start-to-roll analysis.
//!
//! Before touching the full dynamics, a cheap static balance answers two
//! questions: does the drive torque beat rolling friction at all, and
//! roughly how fast should the ring spin up. The fluid slug is treated
//! as a point mass that the pump flings up the channel wall; the angle
//! it reaches sets the gravity torque available to the ring.

use crate::drive::{effective_voltage, DriveSignal};
use crate::error::{Error, Result};
use crate::pump::{pump_flow, PumpModel};

/// Geometry, masses and friction coefficients of one robot.
///
/// `r1_m` is the outer rolling radius of the shell, `r2_m` the
/// centerline radius of the fluid channel. `j1_kgm2`/`j2_kgm2` are the
/// shell and slug moments of inertia about the center. `k1` is the
/// dimensionless rolling-resistance coefficient and the `xi` values are
/// viscous coefficients in N*m*s/rad. `l_c_m` is the characteristic
/// length converting slug speed to climb height.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotParams {
    pub m1_kg: f64,
    pub m2_kg: f64,
    pub r1_m: f64,
    pub r2_m: f64,
    pub j1_kgm2: f64,
    pub j2_kgm2: f64,
    pub area_m2: f64,
    pub g_ms2: f64,
    pub k1: f64,
    pub xi_m1: f64,
    pub xi_m2: f64,
    pub l_c_m: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        // Shell mass is the assembly weight minus the working fluid
        // (1.2 mL at 1660 kg/m^3). Moments of inertia use the thin-ring
        // and point-mass idealizations j = m*r^2. Friction and viscous
        // coefficients come from calibration against the steady rolling
        // rate at the nominal operating point.
        RobotParams {
            m1_kg: 4.06e-3,
            m2_kg: 1.992e-3,
            r1_m: 0.03,
            r2_m: 0.024,
            j1_kgm2: 3.654e-6,
            j2_kgm2: 1.147392e-6,
            area_m2: 1.2e-5,
            g_ms2: 9.81,
            k1: 0.0,
            xi_m1: 2.3384872321503975e-6,
            xi_m2: 4.0e-6,
            l_c_m: 0.024,
        }
    }
}

impl RobotParams {
    /// Checks the field invariants, reporting the offending field by name.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m1_kg", self.m1_kg),
            ("m2_kg", self.m2_kg),
            ("r1_m", self.r1_m),
            ("r2_m", self.r2_m),
            ("j1_kgm2", self.j1_kgm2),
            ("j2_kgm2", self.j2_kgm2),
            ("area_m2", self.area_m2),
            ("g_ms2", self.g_ms2),
            ("l_c_m", self.l_c_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and positive, got {v}")));
            }
        }
        let non_negative = [("k1", self.k1), ("xi_m1", self.xi_m1), ("xi_m2", self.xi_m2)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.r2_m >= self.r1_m {
            return Err(Error::InvalidInput(format!(
                "r2_m ({}) must be smaller than r1_m ({})",
                self.r2_m, self.r1_m
            )));
        }
        Ok(())
    }
}

/// Angle (rad) the slug climbs to when launched along the channel at
/// speed `mu` (m/s), from the energy balance of the launch speed against
/// gravity over the characteristic length. Saturates at pi once the slug
/// would carry over the top.
pub fn climb_angle(params: &RobotParams, mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidInput(format!("fluid speed must be finite and non-negative, got {mu}")));
    }
    let arg = 1.0 - mu * mu / (2.0 * params.g_ms2 * params.l_c_m);
    Ok(arg.clamp(-1.0, 1.0).acos())
}

/// Mean fluid speed (m/s) through the channel at volumetric flow `q`.
pub fn fluid_speed(params: &RobotParams, q: f64) -> Result<f64> {
    if !q.is_finite() || q < 0.0 {
        return Err(Error::InvalidInput(format!("flow rate must be finite and non-negative, got {q}")));
    }
    Ok(q / params.area_m2)
}

/// Gravity torque (N*m) about the contact available from the slug
/// displaced to `theta` (rad). `theta` outside [0, pi] is rejected: the
/// climb model never produces such angles and the torque bound is
/// meaningless there.
pub fn max_drive_torque(params: &RobotParams, theta: f64) -> Result<f64> {
    if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidInput(format!("climb angle must lie in [0, pi], got {theta}")));
    }
    Ok(params.m2_kg * params.g_ms2 * params.r2_m * theta.sin())
}

/// Rolling-resistance torque bound (N*m) for the full assembly weight.
pub fn friction_torque(params: &RobotParams) -> f64 {
    params.k1 * params.r1_m * (params.m1_kg + params.m2_kg) * params.g_ms2
}

/// Sign convention for the friction direction term.
pub fn sign_friction(omega: f64) -> f64 {
    if omega > 0.0 {
        1.0
    } else if omega < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Outcome of the static start-to-roll balance.
#[derive(Debug, Clone, PartialEq)]
pub struct StartToRoll {
    /// True when the drive torque strictly beats rolling friction.
    pub rolls: bool,
    /// Drive torque minus friction torque, N*m.
    pub margin: f64,
    /// Slug climb angle used for the drive torque, rad.
    pub theta: f64,
}

/// Static roll / no-roll decision at the duty-averaged drive voltage.
pub fn start_to_roll(params: &RobotParams, pump: &PumpModel, signal: &DriveSignal) -> Result<StartToRoll> {
    params.validate()?;
    signal.validate()?;
    let v_eff = effective_voltage(signal);
    let q = pump_flow(pump, v_eff)?;
    let mu = fluid_speed(params, q)?;
    let theta = climb_angle(params, mu)?;
    let t_drive = max_drive_torque(params, theta)?;
    let margin = t_drive - friction_torque(params);
    Ok(StartToRoll {
        rolls: margin > 0.0,
        margin,
        theta,
    })
}

/// Which drive voltage the static spin-up estimate evaluates the pump at.
///
/// `OnPhase` uses the on-level voltage: the slug is flung while the pump
/// is actually on, and the duty factor already accounts for the off
/// fraction. `Effective` uses the duty-averaged voltage instead, making
/// the estimate consistent with [`start_to_roll`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StaticsVoltage {
    #[default]
    OnPhase,
    Effective,
}

/// Quasi-static estimate of the ring angular rate (rad/s) reached per
/// actuation period: net torque impulse over one on-phase divided by the
/// shell inertia. Clamped at zero when friction wins.
pub fn static_angular_velocity(
    params: &RobotParams,
    pump: &PumpModel,
    signal: &DriveSignal,
    voltage: StaticsVoltage,
) -> Result<f64> {
    params.validate()?;
    signal.validate()?;
    let v = match voltage {
        StaticsVoltage::OnPhase => signal.v_max_kv,
        StaticsVoltage::Effective => effective_voltage(signal),
    };
    let q = pump_flow(pump, v)?;
    let mu = fluid_speed(params, q)?;
    let theta = climb_angle(params, mu)?;
    let net = max_drive_torque(params, theta)? - friction_torque(params);
    Ok((signal.duty * signal.period() / params.j1_kgm2) * net.max(0.0))
}
