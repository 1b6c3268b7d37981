//! CSV emission and ingestion.
//!
//! All output uses `.` as the decimal separator, bare line feeds, and
//! the shortest float text that parses back to the same value, so
//! repeated runs produce byte-identical files. Ingestion is strict: the
//! expected header must be present verbatim and every defect is
//! reported with its line number.

use crate::error::{Error, Result};
use crate::harness::{linear_displacement, SweepResult};
use crate::trajectory::Trajectory;

/// Header of trajectory files.
pub const TRAJECTORY_HEADER: &str = "t_s,theta1_rad,theta2_rad,omega1_rads,omega2_rads,v_kv,x_m";
/// Header of duty-sweep files.
pub const SWEEP_HEADER: &str = "duty,omega_ss_rads,settle_time_s,regime,static_model_omega_rads";
/// Header of calibration-fit reports.
pub const FIT_HEADER: &str = "a,b,rms";
/// Header required of calibration input data.
pub const CALIBRATION_HEADER: &str = "voltage_kv,value";

/// Renders a trajectory, one row per sample, with the rolling-contact
/// displacement as the last column.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let xs = linear_displacement(traj);
    let mut out = String::with_capacity(64 * (traj.samples.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (sample, x) in traj.samples.iter().zip(xs) {
        let s = &sample.state;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.t, s.theta1, s.theta2, s.omega1, s.omega2, sample.v_kv, x
        ));
    }
    out
}

/// Renders a duty sweep. Rows that failed keep their duty, carry
/// `error` in the regime column and leave the numeric columns empty.
/// A settle time of infinity is written as `inf`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::with_capacity(48 * (result.rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in &result.rows {
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let regime = match &row.regime {
            Some(r) => r.to_string(),
            None => "error".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.duty,
            num(row.omega_ss_rads),
            num(row.settle_time_s),
            regime,
            num(row.static_model_omega_rads)
        ));
    }
    out
}

/// Renders one fitted quadratic as a single-row report.
pub fn fit_csv(a: f64, b: f64, rms: f64) -> String {
    format!("{FIT_HEADER}\n{a},{b},{rms}\n")
}

/// Parses calibration data: the exact `voltage_kv,value` header, then
/// one `voltage,reading` pair per line. Trailing carriage returns are
/// tolerated; everything else is enforced.
pub fn parse_calibration_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == CALIBRATION_HEADER => {}
        Some((_, header)) => {
            return Err(Error::CsvParse {
                line: 1,
                msg: format!("expected header `{CALIBRATION_HEADER}`, got `{header}`"),
            })
        }
        None => {
            return Err(Error::CsvParse {
                line: 1,
                msg: format!("empty input, expected header `{CALIBRATION_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let content = raw.trim_end_matches('\r');
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split(',');
        let (v_text, y_text) = match (fields.next(), fields.next(), fields.next()) {
            (Some(v), Some(y), None) => (v, y),
            _ => {
                return Err(Error::CsvParse {
                    line,
                    msg: format!("expected two comma-separated fields, got `{content}`"),
                })
            }
        };
        let parse = |field: &str, name: &str| -> Result<f64> {
            let value: f64 = field.trim().parse().map_err(|_| Error::CsvParse {
                line,
                msg: format!("{name} `{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    line,
                    msg: format!("{name} `{field}` is not finite"),
                });
            }
            Ok(value)
        };
        rows.push((parse(v_text, "voltage")?, parse(y_text, "value")?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DriveSignal;
    use crate::dynamics::{SimOptions, State};
    use crate::harness::{Regime, SweepRow};
    use crate::statics::RobotParams;
    use crate::trajectory::{RunMetadata, Sample};

    fn one_sample_traj() -> Trajectory {
        let sample = Sample {
            state: State { t: 0.5, theta1: 1.0, theta2: 2.0, omega1: 3.0, omega2: 4.0 },
            v_kv: 4.5,
        };
        Trajectory::from_samples(
            vec![sample],
            RobotParams::default(),
            DriveSignal::default(),
            2.0e-3,
            RunMetadata { run_id: String::new(), options: SimOptions::default() },
        )
        .unwrap()
    }

    #[test]
    fn trajectory_rows_are_shortest_form() {
        let text = trajectory_csv(&one_sample_traj());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TRAJECTORY_HEADER);
        assert_eq!(lines.next().unwrap(), "0.5,1,2,3,4,4.5,0.03");
        assert_eq!(lines.next(), None);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn sweep_rows_cover_ok_inf_and_error() {
        let result = SweepResult {
            rows: vec![
                SweepRow {
                    duty: 0.3,
                    omega_ss_rads: Some(0.25),
                    settle_time_s: Some(1.2),
                    regime: Some(Regime::Rolling),
                    static_model_omega_rads: Some(0.31),
                    error: None,
                },
                SweepRow {
                    duty: 0.5,
                    omega_ss_rads: Some(0.0),
                    settle_time_s: Some(f64::INFINITY),
                    regime: Some(Regime::Oscillating),
                    static_model_omega_rads: Some(0.5),
                    error: None,
                },
                SweepRow {
                    duty: 0.7,
                    omega_ss_rads: None,
                    settle_time_s: None,
                    regime: None,
                    static_model_omega_rads: None,
                    error: Some("step too large".into()),
                },
            ],
        };
        let text = sweep_csv(&result);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines[1], "0.3,0.25,1.2,rolling,0.31");
        assert_eq!(lines[2], "0.5,0,inf,oscillating,0.5");
        assert_eq!(lines[3], "0.7,,,error,");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn fit_report_single_row() {
        assert_eq!(fit_csv(2.152, -2.031, 0.0), "a,b,rms\n2.152,-2.031,0\n");
    }

    #[test]
    fn calibration_parse_happy_path() {
        let rows = parse_calibration_csv("voltage_kv,value\n1,0.121\n2,4.55\n\n10,194.89\n")
            .unwrap();
        assert_eq!(rows, vec![(1.0, 0.121), (2.0, 4.55), (10.0, 194.89)]);
    }

    #[test]
    fn calibration_parse_tolerates_crlf() {
        let rows = parse_calibration_csv("voltage_kv,value\r\n1,2\r\n").unwrap();
        assert_eq!(rows, vec![(1.0, 2.0)]);
    }

    #[test]
    fn calibration_header_is_mandatory() {
        for (text, line) in [
            ("", 1),
            ("volts,value\n1,2\n", 1),
            ("voltage_kv,value,extra\n", 1),
        ] {
            match parse_calibration_csv(text) {
                Err(Error::CsvParse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn calibration_data_defects_carry_line_numbers() {
        for (text, line) in [
            ("voltage_kv,value\n1\n", 2),
            ("voltage_kv,value\n1,2,3\n", 2),
            ("voltage_kv,value\n1,2\nx,3\n", 3),
            ("voltage_kv,value\n1,2\n3,nan\n", 3),
            ("voltage_kv,value\n1,inf\n", 2),
        ] {
            match parse_calibration_csv(text) {
                Err(Error::CsvParse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_through_float_text() {
        let traj = one_sample_traj();
        let text = trajectory_csv(&traj);
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0].to_bits(), 0.5f64.to_bits());
        assert_eq!(fields[6].to_bits(), (0.03f64 * 1.0).to_bits());
    }
}
