//! Friction calibration against a target steady rate.
//!
//! The free parameters are the rolling-friction coefficient and the
//! shell viscous coefficient. A coarse scan over a (k1, log xi_m1) grid
//! picks the most promising cell, then a golden-section refinement of
//! log xi_m1 at that k1 drives the steady-rate residual down. The
//! steady rate is monotone in xi_m1, so the residual is unimodal along
//! the refined axis. Ties keep the earliest grid cell, which prefers
//! the smallest k1 able to reach the target.

use crate::config::RunConfig;
use crate::drive::DriveSignal;
use crate::dynamics::{integrate, SimOptions, State};
use crate::error::{Error, Result};
use crate::harness::detect_steady_state;
use crate::pump::PumpModel;
use crate::statics::RobotParams;

/// Outcome of a friction search. `converged` is false when the
/// iteration budget ran out before the residual entered the acceptance
/// band; the best visited point is still reported.
#[derive(Debug, Clone, PartialEq)]
pub struct FrictionCalibration {
    pub k1: f64,
    pub xi_m1: f64,
    /// Steady rate the best parameters actually produce, rad/s.
    pub omega_ss_rads: f64,
    /// |omega_ss - target|, rad/s.
    pub residual_rads: f64,
    /// Simulations spent.
    pub evaluations: usize,
    pub converged: bool,
}

const K1_GRID: [f64; 6] = [0.0, 1.0e-5, 3.0e-5, 1.0e-4, 3.0e-4, 1.0e-3];
const LOG_XI_LO: f64 = -20.7; // ~1e-9 N*m*s/rad
const LOG_XI_HI: f64 = -6.9; // ~1e-3 N*m*s/rad
const LOG_XI_STEPS: usize = 24;

struct Search<'a> {
    robot: RobotParams,
    pump: &'a PumpModel,
    signal: &'a DriveSignal,
    options: SimOptions,
    dt: f64,
    t_end: f64,
    window: usize,
    rel_tol: f64,
    target: f64,
    evaluations: usize,
    best: Option<(f64, f64, f64, f64)>,
    first_error: Option<Error>,
}

impl Search<'_> {
    /// Residual at one candidate point; infinity when the simulation
    /// fails, so the search walks around bad cells.
    fn eval(&mut self, k1: f64, xi_m1: f64) -> f64 {
        self.evaluations += 1;
        self.robot.k1 = k1;
        self.robot.xi_m1 = xi_m1;
        let outcome = integrate(
            State::at_rest(0.0),
            &self.robot,
            self.pump,
            self.signal,
            self.t_end,
            self.dt,
            &self.options,
        )
        .and_then(|traj| detect_steady_state(&traj, self.window, self.rel_tol));
        match outcome {
            Ok((omega_ss, _)) => {
                let residual = (omega_ss - self.target).abs();
                let better = match &self.best {
                    Some((best_res, ..)) => residual < *best_res,
                    None => true,
                };
                if better {
                    self.best = Some((residual, k1, xi_m1, omega_ss));
                }
                residual
            }
            Err(e) => {
                if self.first_error.is_none() {
                    self.first_error = Some(e);
                }
                f64::INFINITY
            }
        }
    }
}

/// Searches (k1, xi_m1) so that the configured drive reaches
/// `target_omega_rads` in steady state.
///
/// The acceptance band is 5% of the target (absolute 1e-9 rad/s for a
/// zero target). The golden-section budget is `calib_max_iters`.
pub fn calibrate_friction(config: &RunConfig, target_omega_rads: f64) -> Result<FrictionCalibration> {
    config.validate()?;
    if !(target_omega_rads.is_finite() && target_omega_rads >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "target steady rate must be finite and non-negative, got {target_omega_rads}"
        )));
    }
    let tolerance = if target_omega_rads == 0.0 { 1.0e-9 } else { 0.05 * target_omega_rads };
    let mut search = Search {
        robot: config.robot.clone(),
        pump: &config.pump,
        signal: &config.signal,
        // Dry friction participates whenever k1 does; at k1 = 0 the
        // added torque vanishes, so zero-k1 cells match a plain run.
        options: SimOptions { dry_friction: true, ..config.sim.clone() },
        dt: config.dt_s,
        t_end: config.t_end_s,
        window: config.harness.ss_window_periods,
        rel_tol: config.harness.ss_rel_tol,
        target: target_omega_rads,
        evaluations: 0,
        best: None,
        first_error: None,
    };

    let log_grid: Vec<f64> = (0..=LOG_XI_STEPS)
        .map(|i| LOG_XI_LO + (LOG_XI_HI - LOG_XI_LO) * i as f64 / LOG_XI_STEPS as f64)
        .collect();
    let mut best_cell: Option<(f64, f64, usize)> = None;
    'scan: for &k1 in &K1_GRID {
        for (idx, &lx) in log_grid.iter().enumerate() {
            let residual = search.eval(k1, lx.exp());
            let better = match best_cell {
                Some((best_res, ..)) => residual < best_res,
                None => residual.is_finite(),
            };
            if better {
                best_cell = Some((residual, k1, idx));
            }
            if residual <= tolerance {
                break 'scan;
            }
        }
    }
    let Some((_, k1, idx)) = best_cell else {
        return Err(search.first_error.unwrap_or_else(|| {
            Error::InvalidInput("no calibration cell produced a steady rate".into())
        }));
    };

    let mut done = search.best.as_ref().is_some_and(|(res, ..)| *res <= tolerance);
    if !done {
        // Golden-section on log xi_m1 inside the best cell's neighbors.
        let mut a = log_grid[idx.saturating_sub(1)];
        let mut b = log_grid[(idx + 1).min(log_grid.len() - 1)];
        let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let mut f1 = search.eval(k1, x1.exp());
        let mut f2 = search.eval(k1, x2.exp());
        for _ in 0..config.calib_max_iters {
            if search.best.as_ref().is_some_and(|(res, ..)| *res <= tolerance) {
                done = true;
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = search.eval(k1, x1.exp());
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = search.eval(k1, x2.exp());
            }
        }
        if search.best.as_ref().is_some_and(|(res, ..)| *res <= tolerance) {
            done = true;
        }
    }

    let (residual, k1, xi_m1, omega_ss) =
        search.best.expect("a finite cell was found, so a best point exists");
    Ok(FrictionCalibration {
        k1,
        xi_m1,
        omega_ss_rads: omega_ss,
        residual_rads: residual,
        evaluations: search.evaluations,
        converged: done,
    })
}
