//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment, blank lines are skipped.
//! Every key is optional and falls back to the reference default; any
//! key outside the fixed vocabulary is an error rather than a silently
//! ignored typo. Duplicate keys are rejected for the same reason.

use std::collections::HashSet;
use std::path::Path;

use crate::drive::DriveSignal;
use crate::dynamics::SimOptions;
use crate::error::{Error, Result};
use crate::harness::HarnessOptions;
use crate::pump::PumpModel;
use crate::statics::{RobotParams, StaticsVoltage};

/// Everything a run needs, as read from one config file.
///
/// The pump coefficients are not part of the file vocabulary; they are
/// replaced through calibration data, not hand-edited.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub robot: RobotParams,
    pub pump: PumpModel,
    pub signal: DriveSignal,
    pub sim: SimOptions,
    pub dt_s: f64,
    pub t_end_s: f64,
    pub eq17_voltage: StaticsVoltage,
    pub harness: HarnessOptions,
    pub calib_max_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            robot: RobotParams::default(),
            pump: PumpModel::default(),
            signal: DriveSignal::default(),
            sim: SimOptions::default(),
            dt_s: 2.0e-3,
            t_end_s: 12.0,
            eq17_voltage: StaticsVoltage::default(),
            harness: HarnessOptions::default(),
            calib_max_iters: 60,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.robot.validate()?;
        self.pump.validate()?;
        self.signal.validate()?;
        self.sim.validate()?;
        self.harness.validate()?;
        if !(self.dt_s.is_finite() && self.dt_s > 0.0) {
            return Err(Error::ConfigValue {
                key: "dt_s".into(),
                msg: format!("must be finite and positive, got {}", self.dt_s),
            });
        }
        if !(self.t_end_s.is_finite() && self.t_end_s > 0.0) {
            return Err(Error::ConfigValue {
                key: "t_end_s".into(),
                msg: format!("must be finite and positive, got {}", self.t_end_s),
            });
        }
        if self.calib_max_iters == 0 {
            return Err(Error::ConfigValue {
                key: "calib_max_iters".into(),
                msg: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::ConfigParse {
        line,
        msg: format!("key `{key}` needs a number, got `{value}`"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.parse::<usize>().map_err(|_| Error::ConfigParse {
        line,
        msg: format!("key `{key}` needs a non-negative integer, got `{value}`"),
    })
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::ConfigParse {
            line,
            msg: format!("key `{key}` needs `true` or `false`, got `{value}`"),
        }),
    }
}

/// Parses config text. Missing keys keep their defaults; the result is
/// validated before being returned.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::ConfigParse {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::ConfigParse { line, msg: format!("duplicate key `{key}`") });
        }
        match key {
            "v_max_kv" => cfg.signal.v_max_kv = parse_f64(key, value, line)?,
            "v_min_kv" => cfg.signal.v_min_kv = parse_f64(key, value, line)?,
            "duty" => cfg.signal.duty = parse_f64(key, value, line)?,
            "frequency_hz" => cfg.signal.frequency_hz = parse_f64(key, value, line)?,
            "phase_s" => cfg.signal.phase_s = parse_f64(key, value, line)?,
            "m1_kg" => cfg.robot.m1_kg = parse_f64(key, value, line)?,
            "m2_kg" => cfg.robot.m2_kg = parse_f64(key, value, line)?,
            "r1_m" => cfg.robot.r1_m = parse_f64(key, value, line)?,
            "r2_m" => cfg.robot.r2_m = parse_f64(key, value, line)?,
            "j1_kgm2" => cfg.robot.j1_kgm2 = parse_f64(key, value, line)?,
            "j2_kgm2" => cfg.robot.j2_kgm2 = parse_f64(key, value, line)?,
            "area_m2" => cfg.robot.area_m2 = parse_f64(key, value, line)?,
            "g_ms2" => cfg.robot.g_ms2 = parse_f64(key, value, line)?,
            "k1" => cfg.robot.k1 = parse_f64(key, value, line)?,
            "xi_m1" => cfg.robot.xi_m1 = parse_f64(key, value, line)?,
            "xi_m2" => cfg.robot.xi_m2 = parse_f64(key, value, line)?,
            "l_c_m" => cfg.robot.l_c_m = parse_f64(key, value, line)?,
            "dt_s" => cfg.dt_s = parse_f64(key, value, line)?,
            "t_end_s" => cfg.t_end_s = parse_f64(key, value, line)?,
            "dry_friction" => cfg.sim.dry_friction = parse_bool(key, value, line)?,
            "sign_epsilon_rads" => cfg.sim.sign_epsilon_rads = parse_f64(key, value, line)?,
            "det_floor" => cfg.sim.det_floor = parse_f64(key, value, line)?,
            "eq17_voltage" => {
                cfg.eq17_voltage = match value {
                    "on_phase" => StaticsVoltage::OnPhase,
                    "effective" => StaticsVoltage::Effective,
                    _ => {
                        return Err(Error::ConfigParse {
                            line,
                            msg: format!(
                                "key `eq17_voltage` needs `on_phase` or `effective`, got `{value}`"
                            ),
                        })
                    }
                }
            }
            "theta_still_rad" => cfg.harness.theta_still_rad = parse_f64(key, value, line)?,
            "omega_roll_rads" => cfg.harness.omega_roll_rads = parse_f64(key, value, line)?,
            "ss_rel_tol" => cfg.harness.ss_rel_tol = parse_f64(key, value, line)?,
            "ss_window_periods" => cfg.harness.ss_window_periods = parse_usize(key, value, line)?,
            "calib_max_iters" => cfg.calib_max_iters = parse_usize(key, value, line)?,
            _ => {
                return Err(Error::ConfigParse { line, msg: format!("unknown key `{key}`") });
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Renders a config as text that parses back to an equal value. Floats
/// use the shortest representation that survives the round trip.
pub fn save_config(cfg: &RunConfig) -> String {
    let eq17 = match cfg.eq17_voltage {
        StaticsVoltage::OnPhase => "on_phase",
        StaticsVoltage::Effective => "effective",
    };
    format!(
        "v_max_kv = {}\nv_min_kv = {}\nduty = {}\nfrequency_hz = {}\nphase_s = {}\n\
         m1_kg = {}\nm2_kg = {}\nr1_m = {}\nr2_m = {}\nj1_kgm2 = {}\nj2_kgm2 = {}\n\
         area_m2 = {}\ng_ms2 = {}\nk1 = {}\nxi_m1 = {}\nxi_m2 = {}\nl_c_m = {}\n\
         dt_s = {}\nt_end_s = {}\ndry_friction = {}\nsign_epsilon_rads = {}\ndet_floor = {}\n\
         eq17_voltage = {}\ntheta_still_rad = {}\nomega_roll_rads = {}\nss_rel_tol = {}\n\
         ss_window_periods = {}\ncalib_max_iters = {}\n",
        cfg.signal.v_max_kv,
        cfg.signal.v_min_kv,
        cfg.signal.duty,
        cfg.signal.frequency_hz,
        cfg.signal.phase_s,
        cfg.robot.m1_kg,
        cfg.robot.m2_kg,
        cfg.robot.r1_m,
        cfg.robot.r2_m,
        cfg.robot.j1_kgm2,
        cfg.robot.j2_kgm2,
        cfg.robot.area_m2,
        cfg.robot.g_ms2,
        cfg.robot.k1,
        cfg.robot.xi_m1,
        cfg.robot.xi_m2,
        cfg.robot.l_c_m,
        cfg.dt_s,
        cfg.t_end_s,
        cfg.sim.dry_friction,
        cfg.sim.sign_epsilon_rads,
        cfg.sim.det_floor,
        eq17,
        cfg.harness.theta_still_rad,
        cfg.harness.omega_roll_rads,
        cfg.harness.ss_rel_tol,
        cfg.harness.ss_window_periods,
        cfg.calib_max_iters,
    )
}

/// Writes a config file that load_config reads back equal.
pub fn write_config(cfg: &RunConfig, path: &Path) -> Result<()> {
    std::fs::write(path, save_config(cfg))?;
    Ok(())
}
