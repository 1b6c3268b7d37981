//! Simulation library for a ring-shaped rolling robot driven by an
//! electrohydrodynamic pump.
//!
//! The model stack, bottom up:
//!
//! * [`pump`]: empirical quadratic pressure/flow characteristics of the
//!   pump versus applied voltage, plus least-squares refitting from
//!   measured data.
//! * [`drive`]: ideal square-wave high-voltage drive with duty control.
//! * [`statics`]: start-to-roll analysis of the fluid slug climbing the
//!   ring channel against rolling friction, and the quasi-static
//!   angular-rate estimate.
//! * [`dynamics`]: the coupled shell/slug equations of motion as a 2x2
//!   matrix ODE, integrated with fixed-step fourth-order Runge-Kutta
//!   aligned to the drive's switching instants.
//! * [`energy`]: per-term energy bookkeeping and a balance residual.
//! * [`harness`]: steady-state detection, regime classification and
//!   duty sweeps.
//! * [`calibrate`]: fits the friction parameters so a drive reaches a
//!   target steady rate.
//! * [`check`]: self-contained oracle checks runnable on any config.
//! * [`config`], [`csv`], [`svg`]: plain-text run configuration, CSV
//!   input/output and minimal static plots.
//!
//! Everything is deterministic: identical inputs produce bit-identical
//! trajectories, CSV bytes and SVG bytes.

pub mod calibrate;
pub mod check;
pub mod config;
pub mod csv;
pub mod drive;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod harness;
pub mod pump;
pub mod statics;
pub mod svg;
pub mod trajectory;

pub use calibrate::{calibrate_friction, FrictionCalibration};
pub use check::{run_checks, CheckResult};
pub use config::{load_config, parse_config, save_config, write_config, RunConfig};
pub use drive::{effective_voltage, voltage_at, DriveSignal};
pub use dynamics::{
    derivatives, drive_force, integrate, solve_accel, system_matrices, SimOptions, State,
    SystemMatrices,
};
pub use energy::{energy_audit, energy_breakdown, EnergyBreakdown, EnergySample};
pub use error::{Error, Result};
pub use harness::{
    classify_regime, detect_steady_state, linear_displacement, sweep_duty, HarnessOptions, Regime,
    SweepResult, SweepRow,
};
pub use pump::{
    apply_empirical_scaling, fit_quadratic, pump_flow, pump_pressure, PumpModel,
};
pub use statics::{
    climb_angle, fluid_speed, friction_torque, max_drive_torque, sign_friction,
    start_to_roll, static_angular_velocity, RobotParams, StartToRoll, StaticsVoltage,
};
pub use trajectory::{RunMetadata, Sample, Trajectory};
