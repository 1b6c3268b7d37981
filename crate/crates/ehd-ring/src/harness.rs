//! Experiment layer: steady-state detection, regime classification,
//! duty sweeps and the rolling-constraint displacement readout.
//!
//! Steady state is judged on waveform-period means of the shell rate,
//! not instantaneous values, because the pulsed drive makes the rate
//! ripple within every period. One period mean per whole period is the
//! unit all detection logic works in.

use crate::drive::DriveSignal;
use crate::dynamics::{integrate, SimOptions, State};
use crate::error::{Error, Result};
use crate::pump::PumpModel;
use crate::statics::{static_angular_velocity, RobotParams, StaticsVoltage};
use crate::trajectory::Trajectory;

/// Thresholds used by detection and classification.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessOptions {
    /// Shell deflections below this count as no motion, rad.
    pub theta_still_rad: f64,
    /// Steady rates above this count as rolling, rad/s.
    pub omega_roll_rads: f64,
    /// Relative half-width of the settled band around omega_ss.
    pub ss_rel_tol: f64,
    /// Whole waveform periods averaged for omega_ss.
    pub ss_window_periods: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            theta_still_rad: 1.0e-3,
            omega_roll_rads: 0.05,
            ss_rel_tol: 0.05,
            ss_window_periods: 5,
        }
    }
}

impl HarnessOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_still_rad.is_finite() && self.theta_still_rad > 0.0) {
            return Err(Error::InvalidInput(format!(
                "theta_still_rad must be finite and positive, got {}",
                self.theta_still_rad
            )));
        }
        if !(self.omega_roll_rads.is_finite() && self.omega_roll_rads > 0.0) {
            return Err(Error::InvalidInput(format!(
                "omega_roll_rads must be finite and positive, got {}",
                self.omega_roll_rads
            )));
        }
        if !(self.ss_rel_tol.is_finite() && self.ss_rel_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "ss_rel_tol must be finite and non-negative, got {}",
                self.ss_rel_tol
            )));
        }
        if self.ss_window_periods == 0 {
            return Err(Error::InvalidInput("ss_window_periods must be at least 1".into()));
        }
        Ok(())
    }
}

/// Qualitative motion outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Stationary,
    Oscillating,
    Rolling,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Stationary => "stationary",
            Regime::Oscillating => "oscillating",
            Regime::Rolling => "rolling",
        })
    }
}

/// One duty point of a sweep. Rows that failed to simulate keep their
/// duty and carry the failure text instead of results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub duty: f64,
    pub omega_ss_rads: Option<f64>,
    pub settle_time_s: Option<f64>,
    pub regime: Option<Regime>,
    pub static_model_omega_rads: Option<f64>,
    pub error: Option<String>,
}

/// Duty sweep output, rows in strictly increasing duty order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Mean of the shell rate over [a, b], by trapezoids on sample segments
/// clipped to the window.
///
/// Accumulates deviations from a reference sample instead of raw values
/// so a constant series averages to that constant bit-exactly.
fn window_mean(traj: &Trajectory, a: f64, b: f64) -> f64 {
    let samples = &traj.samples;
    let reference = samples
        .iter()
        .find(|s| s.state.t >= a)
        .unwrap_or(samples.last().expect("trajectory is never empty"))
        .state
        .omega1;
    let mut weighted = 0.0;
    let mut weight = 0.0;
    for pair in samples.windows(2) {
        let (t0, w0) = (pair[0].state.t, pair[0].state.omega1);
        let (t1, w1) = (pair[1].state.t, pair[1].state.omega1);
        let lo = t0.max(a);
        let hi = t1.min(b);
        if hi <= lo {
            continue;
        }
        let interp = |x: f64| w0 + (x - t0) / (t1 - t0) * (w1 - w0);
        let d_lo = interp(lo) - reference;
        let d_hi = interp(hi) - reference;
        weighted += 0.5 * (d_lo + d_hi) * (hi - lo);
        weight += hi - lo;
    }
    if weight > 0.0 {
        reference + weighted / weight
    } else {
        reference
    }
}

fn whole_periods(traj: &Trajectory) -> usize {
    (traj.duration() / traj.signal.period() + 1.0e-9).floor() as usize
}

/// Steady-state rate and settling time of the shell.
///
/// `omega_ss` is the mean of the shell rate over the final `window`
/// whole waveform periods. The settle time is the elapsed time from the
/// trajectory start to the earliest period boundary after which every
/// period mean stays within `rel_tol * |omega_ss|` of `omega_ss`;
/// infinity when even the final period mean strays outside the band.
pub fn detect_steady_state(traj: &Trajectory, window: usize, rel_tol: f64) -> Result<(f64, f64)> {
    if window == 0 {
        return Err(Error::InvalidInput("window must be at least 1 period".into()));
    }
    if !(rel_tol.is_finite() && rel_tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "rel_tol must be finite and non-negative, got {rel_tol}"
        )));
    }
    let period = traj.signal.period();
    let t0 = traj.start_time();
    let n = whole_periods(traj);
    if n < 2 * window {
        return Err(Error::InsufficientData(format!(
            "trajectory covers {n} whole waveform periods, steady-state detection needs {}",
            2 * window
        )));
    }
    let omega_ss = window_mean(traj, t0 + (n - window) as f64 * period, t0 + n as f64 * period);
    let band = rel_tol * omega_ss.abs();
    let mut settled_from = n;
    for k in (0..n).rev() {
        let mean = window_mean(traj, t0 + k as f64 * period, t0 + (k + 1) as f64 * period);
        if (mean - omega_ss).abs() <= band {
            settled_from = k;
        } else {
            break;
        }
    }
    let settle_time =
        if settled_from == n { f64::INFINITY } else { settled_from as f64 * period };
    Ok((omega_ss, settle_time))
}

/// Sorts a run into stationary, oscillating or rolling.
///
/// Judged on the shell angle's deviation from its initial value, so a
/// run that merely starts at a nonzero angle still counts as
/// stationary. Rolling means a net rotation beyond one turn or a steady
/// rate above the rolling threshold. The steady-rate window shrinks to
/// half the covered periods on short runs.
pub fn classify_regime(traj: &Trajectory, options: &HarnessOptions) -> Result<Regime> {
    options.validate()?;
    let n = whole_periods(traj);
    if n < 5 {
        return Err(Error::InsufficientData(format!(
            "trajectory covers {n} whole waveform periods, classification needs 5"
        )));
    }
    let theta0 = traj.samples[0].state.theta1;
    let max_deviation = traj
        .samples
        .iter()
        .map(|s| (s.state.theta1 - theta0).abs())
        .fold(0.0f64, f64::max);
    if max_deviation < options.theta_still_rad {
        return Ok(Regime::Stationary);
    }
    let net = traj.samples.last().expect("non-empty").state.theta1 - theta0;
    let window = options.ss_window_periods.min(n / 2).max(1);
    let (omega_ss, _) = detect_steady_state(traj, window, options.ss_rel_tol)?;
    if net.abs() > 2.0 * std::f64::consts::PI || omega_ss.abs() > options.omega_roll_rads {
        Ok(Regime::Rolling)
    } else {
        Ok(Regime::Oscillating)
    }
}

/// Runs one simulated trajectory per duty and reduces each to steady
/// rate, settle time and regime, next to the static-model prediction.
///
/// Every row simulates with dry friction enabled, since the threshold
/// between oscillating and rolling is the behavior under study. A row
/// whose simulation or detection fails is kept as an error marker; the
/// sweep itself continues.
#[allow(clippy::too_many_arguments)]
pub fn sweep_duty(
    params: &RobotParams,
    pump: &PumpModel,
    base_signal: &DriveSignal,
    duties: &[f64],
    t_end: f64,
    dt: f64,
    sim_options: &SimOptions,
    harness_options: &HarnessOptions,
    statics_voltage: StaticsVoltage,
) -> Result<SweepResult> {
    params.validate()?;
    pump.validate()?;
    harness_options.validate()?;
    if duties.is_empty() {
        return Err(Error::InvalidInput("duty list must not be empty".into()));
    }
    for d in duties {
        if !(d.is_finite() && (0.0..=1.0).contains(d)) {
            return Err(Error::InvalidInput(format!("duty {d} is outside [0, 1]")));
        }
    }
    for pair in duties.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidInput(format!(
                "duties must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let options = SimOptions { dry_friction: true, ..sim_options.clone() };
    let rows = duties
        .iter()
        .map(|&duty| {
            let signal = DriveSignal { duty, ..base_signal.clone() };
            let outcome = run_one_duty(
                params,
                pump,
                &signal,
                t_end,
                dt,
                &options,
                harness_options,
                statics_voltage,
            );
            match outcome {
                Ok((omega_ss, settle, regime, static_omega)) => SweepRow {
                    duty,
                    omega_ss_rads: Some(omega_ss),
                    settle_time_s: Some(settle),
                    regime: Some(regime),
                    static_model_omega_rads: Some(static_omega),
                    error: None,
                },
                Err(e) => SweepRow {
                    duty,
                    omega_ss_rads: None,
                    settle_time_s: None,
                    regime: None,
                    static_model_omega_rads: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult { rows })
}

#[allow(clippy::too_many_arguments)]
fn run_one_duty(
    params: &RobotParams,
    pump: &PumpModel,
    signal: &DriveSignal,
    t_end: f64,
    dt: f64,
    options: &SimOptions,
    harness_options: &HarnessOptions,
    statics_voltage: StaticsVoltage,
) -> Result<(f64, f64, Regime, f64)> {
    let static_omega = static_angular_velocity(params, pump, signal, statics_voltage)?;
    let traj = integrate(State::at_rest(0.0), params, pump, signal, t_end, dt, options)?;
    let (omega_ss, settle) =
        detect_steady_state(&traj, harness_options.ss_window_periods, harness_options.ss_rel_tol)?;
    let regime = classify_regime(&traj, harness_options)?;
    Ok((omega_ss, settle, regime, static_omega))
}

/// Ground-frame travel of the contact point under rolling without
/// slipping, one value per sample.
pub fn linear_displacement(traj: &Trajectory) -> Vec<f64> {
    let r1 = traj.params.r1_m;
    traj.samples.iter().map(|s| r1 * s.state.theta1).collect()
}
