//! Coupled ring/fluid dynamics.
//!
//! Two generalized coordinates: shell rotation `theta1` and slug
//! rotation `theta2`, both about the ring center. The model is the
//! matrix ODE `M(phi) * accel + K(phi, omega) * omega = C(phi, v)` with
//! `phi = theta2 - theta1`, driven through row 2 by the pump force
//! torque and restored by the gravity torque of the displaced slug.
//! Dry rolling friction is an optional regularized torque on row 1; the
//! baseline equation carries viscous terms only.

use crate::drive::{voltage_at, DriveSignal};
use crate::error::{Error, Result};
use crate::pump::{pump_pressure, PumpModel};
use crate::statics::{friction_torque, RobotParams};
use crate::trajectory::{RunMetadata, Sample, Trajectory};

/// Instantaneous simulation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl State {
    /// All-zero state: robot at rest, slug at the channel bottom.
    pub fn at_rest(t: f64) -> Self {
        State { t, theta1: 0.0, theta2: 0.0, omega1: 0.0, omega2: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.theta1.is_finite()
            && self.theta2.is_finite()
            && self.omega1.is_finite()
            && self.omega2.is_finite()
    }
}

/// Coefficients of the dynamic equation at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMatrices {
    pub m: [[f64; 2]; 2],
    pub k: [[f64; 2]; 2],
    pub c: [f64; 2],
}

/// Integrator options that change the equations being solved.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Adds the regularized dry rolling-friction torque to row 1.
    pub dry_friction: bool,
    /// Regularization width of the friction sign function, rad/s.
    pub sign_epsilon_rads: f64,
    /// Smallest acceptable |det M|, kg^2*m^4.
    pub det_floor: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            dry_friction: false,
            sign_epsilon_rads: 1.0e-3,
            det_floor: 1.0e-18,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.sign_epsilon_rads.is_finite() && self.sign_epsilon_rads > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sign_epsilon_rads must be finite and positive, got {}",
                self.sign_epsilon_rads
            )));
        }
        if !(self.det_floor.is_finite() && self.det_floor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "det_floor must be finite and positive, got {}",
                self.det_floor
            )));
        }
        Ok(())
    }
}

/// Drive force (N) the pumped fluid exerts along the channel.
pub fn drive_force(pump: &PumpModel, params: &RobotParams, v: f64) -> Result<f64> {
    Ok(pump_pressure(pump, v)? * params.area_m2)
}

/// Evaluates the mass matrix, damping matrix and forcing vector at one
/// state and applied voltage.
///
/// Both entries of the first damping row are identical: they share the
/// relative-motion coupling term and the ring viscous coefficient.
pub fn system_matrices(state: &State, params: &RobotParams, pump: &PumpModel, v: f64) -> Result<SystemMatrices> {
    let p = params;
    let phi = state.theta2 - state.theta1;
    let w_rel = state.omega2 - state.omega1;
    let (sin_phi, cos_phi) = phi.sin_cos();
    let coupling = p.m2_kg * p.r1_m * p.r2_m;

    let m = [
        [
            p.j1_kgm2 + p.m1_kg * p.r1_m * p.r1_m + p.m2_kg * p.r1_m * p.r1_m + p.j2_kgm2
                - 2.0 * coupling * cos_phi,
            -p.j2_kgm2 + coupling * cos_phi,
        ],
        [
            coupling * cos_phi - p.m2_kg * p.r2_m * p.r2_m,
            p.m2_kg * p.r2_m * p.r2_m,
        ],
    ];
    let k_shared = coupling * w_rel * sin_phi + p.xi_m1;
    let k = [[k_shared, k_shared], [0.0, p.xi_m2]];
    let gravity = p.m2_kg * p.g_ms2 * p.r2_m * sin_phi;
    let force = drive_force(pump, params, v)?;
    let c = [gravity, force * p.r2_m - gravity];
    Ok(SystemMatrices { m, k, c })
}

/// Solves `M * alpha = C - K * omega - [dry_friction_torque, 0]` by
/// direct elimination with partial pivoting.
pub fn solve_accel(
    mats: &SystemMatrices,
    state: &State,
    dry_friction_torque: f64,
    det_floor: f64,
) -> Result<(f64, f64)> {
    let m = &mats.m;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // A non-finite determinant only arises from a non-finite state, which
    // the integrator reports as divergence; here it passes through as NaN
    // accelerations rather than masquerading as a singular geometry.
    if det.is_finite() && det.abs() < det_floor {
        return Err(Error::SingularMassMatrix {
            t: state.t,
            det,
            theta1: state.theta1,
            theta2: state.theta2,
        });
    }
    let rhs = [
        mats.c[0] - mats.k[0][0] * state.omega1 - mats.k[0][1] * state.omega2 - dry_friction_torque,
        mats.c[1] - mats.k[1][0] * state.omega1 - mats.k[1][1] * state.omega2,
    ];
    // Pivot on the larger leading coefficient, then eliminate.
    let (p0, p1) = if m[0][0].abs() >= m[1][0].abs() { (0, 1) } else { (1, 0) };
    let factor = m[p1][0] / m[p0][0];
    let denom = m[p1][1] - factor * m[p0][1];
    let alpha2 = (rhs[p1] - factor * rhs[p0]) / denom;
    let alpha1 = (rhs[p0] - m[p0][1] * alpha2) / m[p0][0];
    Ok((alpha1, alpha2))
}

fn dry_torque(params: &RobotParams, omega1: f64, options: &SimOptions) -> f64 {
    if options.dry_friction {
        friction_torque(params) * (omega1 / options.sign_epsilon_rads).tanh()
    } else {
        0.0
    }
}

fn derivatives_at_voltage(
    state: &State,
    params: &RobotParams,
    pump: &PumpModel,
    v: f64,
    options: &SimOptions,
) -> Result<[f64; 4]> {
    let mats = system_matrices(state, params, pump, v)?;
    let dry = dry_torque(params, state.omega1, options);
    let (a1, a2) = solve_accel(&mats, state, dry, options.det_floor)?;
    Ok([state.omega1, state.omega2, a1, a2])
}

/// Time derivative of `(theta1, theta2, omega1, omega2)` at the state's
/// own time, with the drive voltage read from the signal.
pub fn derivatives(
    state: &State,
    params: &RobotParams,
    pump: &PumpModel,
    signal: &DriveSignal,
    options: &SimOptions,
) -> Result<[f64; 4]> {
    derivatives_at_voltage(state, params, pump, voltage_at(signal, state.t), options)
}

/// Next waveform switch instant strictly after `t`, or +inf when the
/// waveform is constant.
fn next_switch(signal: &DriveSignal, t: f64, guard: f64) -> f64 {
    if signal.duty <= 0.0 || signal.duty >= 1.0 {
        return f64::INFINITY;
    }
    let p = signal.period();
    let base = ((t - signal.phase_s) / p).floor();
    let mut best = f64::INFINITY;
    for k in [base - 1.0, base, base + 1.0, base + 2.0] {
        for offset in [0.0, signal.duty * p] {
            let cand = signal.phase_s + k * p + offset;
            if cand > t + guard && cand < best {
                best = cand;
            }
        }
    }
    best
}

/// Fixed-step fourth-order Runge-Kutta integration of the dynamic
/// equation from `initial` to `t_end`.
///
/// The forcing is piecewise constant, so the only discontinuities are
/// the waveform switch instants. Steps are shortened to land exactly on
/// each switch, and the step voltage is read at the step midpoint, which
/// is always interior to one phase. Integration error therefore behaves
/// as if the right-hand side were smooth.
///
/// When the waveform actually alternates (0 < duty < 1), `dt` must be at
/// most a quarter of each phase so both phases are resolved.
pub fn integrate(
    initial: State,
    params: &RobotParams,
    pump: &PumpModel,
    signal: &DriveSignal,
    t_end: f64,
    dt: f64,
    options: &SimOptions,
) -> Result<Trajectory> {
    params.validate()?;
    pump.validate()?;
    signal.validate()?;
    options.validate()?;
    if !initial.is_finite() {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    if !t_end.is_finite() || t_end <= initial.t {
        return Err(Error::InvalidStep(format!(
            "t_end ({t_end} s) must exceed the initial time ({} s)",
            initial.t
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStep(format!("dt must be finite and positive, got {dt} s")));
    }
    let period = signal.period();
    if signal.duty > 0.0 && signal.duty < 1.0 {
        let on = signal.duty * period / 4.0;
        let off = (1.0 - signal.duty) * period / 4.0;
        if dt > on || dt > off {
            return Err(Error::InvalidStep(format!(
                "dt = {dt} s cannot resolve both waveform phases at duty {} and frequency {} Hz (needs dt <= {:e} s)",
                signal.duty,
                signal.frequency_hz,
                on.min(off)
            )));
        }
    }

    let switch_guard = period * 1e-12;
    let end_guard = dt * 1e-9;
    let mut state = initial;
    let mut samples = Vec::with_capacity(((t_end - initial.t) / dt).ceil() as usize + 16);
    samples.push(Sample { state, v_kv: voltage_at(signal, state.t) });

    while state.t < t_end - end_guard {
        let t_switch = next_switch(signal, state.t, switch_guard);
        let h = dt.min(t_end - state.t).min(t_switch - state.t);
        // The midpoint voltage is the phase voltage for the whole step,
        // including steps that end exactly on a switch.
        let v = voltage_at(signal, state.t + 0.5 * h);

        let y = [state.theta1, state.theta2, state.omega1, state.omega2];
        let k1 = derivatives_at_voltage(&state, params, pump, v, options)?;
        let s2 = offset_state(&state, &y, &k1, 0.5 * h);
        let k2 = derivatives_at_voltage(&s2, params, pump, v, options)?;
        let s3 = offset_state(&state, &y, &k2, 0.5 * h);
        let k3 = derivatives_at_voltage(&s3, params, pump, v, options)?;
        let s4 = offset_state(&state, &y, &k3, h);
        let k4 = derivatives_at_voltage(&s4, params, pump, v, options)?;

        let mut t_new = state.t + h;
        if (t_new - t_switch).abs() <= switch_guard {
            t_new = t_switch;
        }
        if (t_new - t_end).abs() <= end_guard {
            t_new = t_end;
        }
        state = State {
            t: t_new,
            theta1: y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            theta2: y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            omega1: y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            omega2: y[3] + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
        };
        if !state.is_finite() {
            return Err(Error::Diverged {
                t: t_new,
                what: "state contains NaN or infinite components".into(),
            });
        }
        samples.push(Sample { state, v_kv: voltage_at(signal, state.t) });
    }

    Ok(Trajectory {
        samples,
        params: params.clone(),
        signal: signal.clone(),
        dt,
        metadata: RunMetadata { run_id: String::new(), options: options.clone() },
    })
}

fn offset_state(base: &State, y: &[f64; 4], k: &[f64; 4], h: f64) -> State {
    State {
        t: base.t + h,
        theta1: y[0] + h * k[0],
        theta2: y[1] + h * k[1],
        omega1: y[2] + h * k[2],
        omega2: y[3] + h * k[3],
    }
}
