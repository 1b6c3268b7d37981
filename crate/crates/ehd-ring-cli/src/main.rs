//! Command-line front end for the ring-robot simulator.
//!
//! Every artifact lands under the output directory: trajectory and
//! sweep CSVs, fit reports and optional SVG plots. Standard output
//! carries the scalar results as `name = value` lines. The exit code is
//! zero exactly when no error was recorded anywhere in the run, which
//! includes per-row sweep failures and unconverged calibrations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ehd_ring::{
    calibrate_friction, classify_regime, csv, detect_steady_state, fit_quadratic, integrate,
    load_config, run_checks, svg, sweep_duty, Result, RunConfig, State,
};

#[derive(Parser)]
#[command(
    name = "ehd-sim",
    about = "Ring-shaped robot simulator with an electrohydrodynamic fluid drive",
    after_help = "The environment variable EHD_SIM_SEED is reserved for future use and \
                  currently ignored: every algorithm in this tool is deterministic."
)]
struct Cli {
    /// Config file (`key = value` lines); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV and SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Also write SVG plots next to the CSV output.
    #[arg(long, global = true)]
    plot: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one run and report its steady state.
    Run,
    /// Simulate a uniform grid of duty values.
    Sweep(SweepArgs),
    /// Fit pump coefficients from data, or friction to a target rate.
    Calibrate(CalibrateArgs),
    /// Run the model's internal oracle checks.
    Check,
}

#[derive(Args)]
struct SweepArgs {
    /// Smallest duty of the grid, in [0, 1).
    #[arg(long)]
    duty_min: f64,
    /// Largest duty of the grid, in (duty_min, 1].
    #[arg(long)]
    duty_max: f64,
    /// Number of grid points, at least 2.
    #[arg(long)]
    steps: usize,
}

#[derive(Args)]
struct CalibrateArgs {
    /// What to calibrate.
    #[arg(long, value_enum)]
    mode: CalibrateMode,
    /// Measurement CSV (`voltage_kv,value`), pump mode only.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Target steady rate in rad/s, friction mode only.
    #[arg(long)]
    target_omega: Option<f64>,
}

#[derive(Copy, Clone, ValueEnum)]
enum CalibrateMode {
    Pump,
    Friction,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    match &cli.config {
        Some(path) => load_config(path),
        None => Ok(RunConfig::default()),
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

/// Runs one simulation and prints its reduced outcome. The failure exit
/// paths print through the error type, which names the failure time for
/// diverged runs.
fn cmd_run(cli: &Cli, config: &RunConfig) -> Result<bool> {
    let traj = integrate(
        State::at_rest(0.0),
        &config.robot,
        &config.pump,
        &config.signal,
        config.t_end_s,
        config.dt_s,
        &config.sim,
    )?;
    let (omega_ss, settle) =
        detect_steady_state(&traj, config.harness.ss_window_periods, config.harness.ss_rel_tol)?;
    let regime = classify_regime(&traj, &config.harness)?;
    let path = write_artifact(&cli.out, "trajectory.csv", &csv::trajectory_csv(&traj))?;
    println!("omega_ss_rads = {omega_ss}");
    println!("settle_time_s = {settle}");
    println!("regime = {regime}");
    println!("wrote {}", path.display());
    if cli.plot {
        let path = write_artifact(&cli.out, "trajectory.svg", &svg::trajectory_svg(&traj))?;
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn cmd_sweep(cli: &Cli, config: &RunConfig, args: &SweepArgs) -> Result<bool> {
    if !(args.duty_min >= 0.0 && args.duty_min < args.duty_max && args.duty_max <= 1.0) {
        return Err(ehd_ring::Error::InvalidInput(format!(
            "need 0 <= duty_min < duty_max <= 1, got {} and {}",
            args.duty_min, args.duty_max
        )));
    }
    if args.steps < 2 {
        return Err(ehd_ring::Error::InvalidInput(format!(
            "need at least 2 grid steps, got {}",
            args.steps
        )));
    }
    // Endpoints are stored exactly; interior points interpolate.
    let duties: Vec<f64> = (0..args.steps)
        .map(|i| {
            if i == 0 {
                args.duty_min
            } else if i == args.steps - 1 {
                args.duty_max
            } else {
                args.duty_min
                    + (args.duty_max - args.duty_min) * i as f64 / (args.steps - 1) as f64
            }
        })
        .collect();
    let result = sweep_duty(
        &config.robot,
        &config.pump,
        &config.signal,
        &duties,
        config.t_end_s,
        config.dt_s,
        &config.sim,
        &config.harness,
        config.eq17_voltage,
    )?;
    let path = write_artifact(&cli.out, "sweep.csv", &csv::sweep_csv(&result))?;
    let mut clean = true;
    for row in &result.rows {
        match (&row.error, row.omega_ss_rads, row.settle_time_s, &row.regime) {
            (None, Some(w), Some(s), Some(r)) => {
                println!("duty = {}: omega_ss_rads = {w}, settle_time_s = {s}, regime = {r}", row.duty)
            }
            _ => {
                clean = false;
                eprintln!(
                    "duty = {}: error: {}",
                    row.duty,
                    row.error.as_deref().unwrap_or("missing result")
                );
            }
        }
    }
    println!("wrote {}", path.display());
    if cli.plot {
        let path = write_artifact(&cli.out, "sweep.svg", &svg::sweep_svg(&result))?;
        println!("wrote {}", path.display());
    }
    Ok(clean)
}

fn cmd_calibrate(cli: &Cli, config: &RunConfig, args: &CalibrateArgs) -> Result<bool> {
    match args.mode {
        CalibrateMode::Pump => {
            let Some(data) = &args.data else {
                return Err(ehd_ring::Error::InvalidInput(
                    "pump calibration needs --data <csv>".into(),
                ));
            };
            let rows = csv::parse_calibration_csv(&std::fs::read_to_string(data)?)?;
            let (a, b, rms) = fit_quadratic(&rows)?;
            let path = write_artifact(&cli.out, "fit.csv", &csv::fit_csv(a, b, rms))?;
            println!("a = {a}");
            println!("b = {b}");
            println!("rms = {rms}");
            println!("wrote {}", path.display());
            Ok(true)
        }
        CalibrateMode::Friction => {
            let Some(target) = args.target_omega else {
                return Err(ehd_ring::Error::InvalidInput(
                    "friction calibration needs --target-omega <rad/s>".into(),
                ));
            };
            let result = calibrate_friction(config, target)?;
            println!("k1 = {}", result.k1);
            println!("xi_m1 = {}", result.xi_m1);
            println!("omega_ss_rads = {}", result.omega_ss_rads);
            println!("residual_rads = {}", result.residual_rads);
            println!("evaluations = {}", result.evaluations);
            println!("converged = {}", result.converged);
            if !result.converged {
                eprintln!(
                    "calibration did not converge within {} refinement iterations; \
                     best parameters above",
                    config.calib_max_iters
                );
            }
            Ok(result.converged)
        }
    }
}

fn cmd_check(config: &RunConfig) -> Result<bool> {
    let results = run_checks(config)?;
    let mut all = true;
    for r in &results {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        println!("check {}: {verdict} ({})", r.name, r.detail);
        all &= r.passed;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = load(&cli).and_then(|config| match &cli.command {
        Command::Run => cmd_run(&cli, &config),
        Command::Sweep(args) => cmd_sweep(&cli, &config, args),
        Command::Calibrate(args) => cmd_calibrate(&cli, &config, args),
        Command::Check => cmd_check(&config),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
