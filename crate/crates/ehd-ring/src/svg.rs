//! Minimal static SVG line charts.
//!
//! Hand-rolled on purpose: the plots are diagnostic artifacts whose
//! bytes must be identical across repeated runs, so the renderer avoids
//! anything with hidden state. One chart is a titled panel with axis
//! lines, min/max tick labels and up to a few polyline series.

use crate::harness::SweepResult;
use crate::trajectory::Trajectory;

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 45.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// One named line on a chart.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn finite_bounds(series: &[Series], axis: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for p in &s.points {
            let v = if axis == 0 { p.0 } else { p.1 };
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if lo > hi {
        return (0.0, 1.0);
    }
    if lo == hi {
        // Degenerate span: pad so the line sits mid-panel.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Renders one chart panel translated to `(0, y_offset)` inside an
/// enclosing SVG.
fn panel(
    out: &mut String,
    y_offset: f64,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) {
    let (x_lo, x_hi) = finite_bounds(series, 0);
    let (y_lo, y_hi) = finite_bounds(series, 1);
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let map_x = |v: f64| MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w;
    let map_y = |v: f64| y_offset + MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h;

    let top = y_offset + MARGIN_T;
    let bottom = y_offset + MARGIN_T + plot_h;
    let right = MARGIN_L + plot_w;
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        MARGIN_L + plot_w / 2.0,
        y_offset + 20.0
    ));
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"#000\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{top}\" x2=\"{MARGIN_L}\" y2=\"{bottom}\" stroke=\"#000\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{MARGIN_L}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{x_lo}</text>\n",
        bottom + 16.0
    ));
    out.push_str(&format!(
        "<text x=\"{right}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{x_hi}</text>\n",
        bottom + 16.0
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{y_lo}</text>\n",
        MARGIN_L - 6.0,
        bottom + 4.0
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{y_hi}</text>\n",
        MARGIN_L - 6.0,
        top + 4.0
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n",
        MARGIN_L + plot_w / 2.0,
        bottom + 34.0
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        y_offset + MARGIN_T + plot_h / 2.0,
        y_offset + MARGIN_T + plot_h / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|p| format!("{},{}", map_x(p.0), map_y(p.1)))
            .collect();
        if !coords.is_empty() {
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            right - 150.0,
            top + 14.0 + 14.0 * i as f64,
            s.label
        ));
    }
}

fn document(panels: usize, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{}\" \
         font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n\
         {body}</svg>\n",
        PANEL_H * panels as f64
    )
}

/// Two stacked panels: shell angular rate over time and rolling-contact
/// displacement over time.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let omega: Vec<(f64, f64)> =
        traj.samples.iter().map(|s| (s.state.t, s.state.omega1)).collect();
    let x: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .map(|s| (s.state.t, traj.params.r1_m * s.state.theta1))
        .collect();
    let mut body = String::new();
    panel(
        &mut body,
        0.0,
        "Shell angular rate",
        "t (s)",
        "omega1 (rad/s)",
        &[Series { label: "omega1".into(), points: omega }],
    );
    panel(
        &mut body,
        PANEL_H,
        "Displacement",
        "t (s)",
        "x (m)",
        &[Series { label: "x".into(), points: x }],
    );
    document(2, &body)
}

/// One panel: simulated steady rate against duty, with the static-model
/// prediction overlaid. Error rows are left out.
pub fn sweep_svg(result: &SweepResult) -> String {
    let sim: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| r.omega_ss_rads.map(|w| (r.duty, w)))
        .collect();
    let stat: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter_map(|r| r.static_model_omega_rads.map(|w| (r.duty, w)))
        .collect();
    let mut body = String::new();
    panel(
        &mut body,
        0.0,
        "Steady rate vs duty",
        "duty",
        "omega_ss (rad/s)",
        &[
            Series { label: "simulated".into(), points: sim },
            Series { label: "static model".into(), points: stat },
        ],
    );
    document(1, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DriveSignal;
    use crate::dynamics::{SimOptions, State};
    use crate::harness::{Regime, SweepRow};
    use crate::statics::RobotParams;
    use crate::trajectory::{RunMetadata, Sample};

    fn tiny_traj() -> Trajectory {
        let samples = (0..5)
            .map(|k| Sample {
                state: State {
                    t: k as f64 * 0.1,
                    theta1: k as f64 * 0.2,
                    theta2: 0.0,
                    omega1: 2.0,
                    omega2: 0.0,
                },
                v_kv: 0.0,
            })
            .collect();
        Trajectory::from_samples(
            samples,
            RobotParams::default(),
            DriveSignal::default(),
            0.1,
            RunMetadata { run_id: String::new(), options: SimOptions::default() },
        )
        .unwrap()
    }

    #[test]
    fn trajectory_chart_is_wellformed_and_deterministic() {
        let a = trajectory_svg(&tiny_traj());
        let b = trajectory_svg(&tiny_traj());
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains("omega1 (rad/s)"));
        assert!(a.contains("x (m)"));
    }

    #[test]
    fn sweep_chart_skips_error_rows() {
        let result = SweepResult {
            rows: vec![
                SweepRow {
                    duty: 0.2,
                    omega_ss_rads: Some(0.1),
                    settle_time_s: Some(0.5),
                    regime: Some(Regime::Rolling),
                    static_model_omega_rads: Some(0.15),
                    error: None,
                },
                SweepRow {
                    duty: 0.4,
                    omega_ss_rads: None,
                    settle_time_s: None,
                    regime: None,
                    static_model_omega_rads: None,
                    error: Some("boom".into()),
                },
                SweepRow {
                    duty: 0.6,
                    omega_ss_rads: Some(0.3),
                    settle_time_s: Some(0.7),
                    regime: Some(Regime::Rolling),
                    static_model_omega_rads: Some(0.45),
                    error: None,
                },
            ],
        };
        let svg = sweep_svg(&result);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("static model"));
    }

    #[test]
    fn degenerate_constant_series_still_renders() {
        // All omega values equal, so the y-span is padded rather than
        // dividing by zero.
        let svg = trajectory_svg(&tiny_traj());
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }

    #[test]
    fn single_point_series_renders() {
        let samples = vec![Sample {
            state: State { t: 0.0, theta1: 0.0, theta2: 0.0, omega1: 0.0, omega2: 0.0 },
            v_kv: 0.0,
        }];
        let traj = Trajectory::from_samples(
            samples,
            RobotParams::default(),
            DriveSignal::default(),
            0.1,
            RunMetadata { run_id: String::new(), options: SimOptions::default() },
        )
        .unwrap();
        let svg = trajectory_svg(&traj);
        assert!(svg.contains("<polyline"));
        assert!(!svg.contains("NaN"));
    }
}
