//! Command-line front end: run scenarios, batches, metrics extraction,
//! controller dump, config validation, and plot helpers.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use windloop::config::ScenarioConfig;
use windloop::controllers::design_default_controllers;
use windloop::error::Error;
use windloop::log::{TimeSeriesLog, COLUMNS};
use windloop::sim::{build_controller, compute_metrics, run_scenario, Metrics, MetricsBasis};
use windloop::turbine::TurbineParams;
use windloop::{controller_file, sim};

#[derive(Parser)]
#[command(
    name = "windloop",
    version,
    about = "Reduced-order wind-turbine closed-loop simulator with a blended \
             two-region torque/pitch controller"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV log.
    Simulate {
        /// Scenario configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the log (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every scenario config in a directory.
    Batch {
        /// Directory holding scenario configuration files (*.toml).
        #[arg(long)]
        dir: PathBuf,
        /// Output directory for logs; defaults to the config directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute summary metrics from a CSV log.
    Metrics {
        /// Simulation log to analyze.
        #[arg(long)]
        log: PathBuf,
        /// Scenario config supplying the turbine ratings; defaults used
        /// when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Synthesize the controller and write its gain file.
    DumpController {
        /// Destination gain file (TOML).
        #[arg(long)]
        out: PathBuf,
        /// Scenario config supplying turbine and design parameters;
        /// defaults used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Check a scenario config and report the resolved scenario.
    Validate {
        /// Scenario configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
    },
    /// Reshape a log into long-format CSV (t, series, value) for plotting.
    PlotData {
        /// Simulation log to reshape.
        #[arg(long)]
        log: PathBuf,
        /// Destination long-format CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a gnuplot script that renders the standard panels from a log.
    PlotScript {
        /// Destination script file.
        #[arg(long)]
        out: PathBuf,
        /// Log file path the script will read.
        #[arg(long, default_value = "log.csv")]
        log: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Prints a status line, tolerating a consumer that closed the pipe early
/// (`windloop ... | head`).
fn say(line: std::fmt::Arguments) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{line}");
}

macro_rules! say {
    ($($arg:tt)*) => { say(format_args!($($arg)*)) };
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::IntegrationDiverged { .. } => 3,
        _ => 1,
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Batch { dir, out } => batch(&dir, out.as_deref()),
        Command::Metrics { log, config } => metrics(&log, config.as_deref()),
        Command::DumpController { out, config } => dump_controller(&out, config.as_deref()),
        Command::Validate { config } => validate(&config),
        Command::PlotData { log, out } => plot_data(&log, &out),
        Command::PlotScript { out, log } => plot_script(&out, &log),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Error> {
    ScenarioConfig::from_path(path)
}

fn simulate(config: &Path, out: &Path) -> Result<(), Error> {
    let cfg = load_config(config)?;
    let rs = cfg.resolve()?;
    let log = run_scenario(&rs)?;
    std::fs::create_dir_all(out)?;
    let out_path = out.join(format!("{}.csv", rs.name));
    log.write_csv(&out_path)?;
    let m = compute_metrics(&log, &MetricsBasis::from_params(&rs.params))?;
    say!("{}: {} rows -> {}", rs.name, log.len(), out_path.display());
    print_metrics(&m);
    Ok(())
}

fn batch(dir: &Path, out: Option<&Path>) -> Result<(), Error> {
    let out_dir = out.unwrap_or(dir);
    let mut configs: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err(Error::Config(format!(
            "no .toml scenario files in {}",
            dir.display()
        )));
    }
    let mut scenarios = Vec::with_capacity(configs.len());
    for path in &configs {
        let rs = load_config(path)?.resolve()?;
        scenarios.push(rs);
    }
    std::fs::create_dir_all(out_dir)?;
    let results = sim::run_batch(&scenarios);
    let mut first_err: Option<Error> = None;
    for (name, outcome) in results {
        match outcome {
            Ok(log) => {
                let out_path = out_dir.join(format!("{name}.csv"));
                log.write_csv(&out_path)?;
                say!("{name}: ok, {} rows -> {}", log.len(), out_path.display());
            }
            Err(e) => {
                eprintln!("{name}: failed: {e}");
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn metrics(log_path: &Path, config: Option<&Path>) -> Result<(), Error> {
    let log = TimeSeriesLog::read_csv(log_path)?;
    let params = match config {
        Some(path) => load_config(path)?.resolve()?.params,
        None => TurbineParams::default(),
    };
    let m = compute_metrics(&log, &MetricsBasis::from_params(&params))?;
    print_metrics(&m);
    Ok(())
}

fn print_metrics(m: &Metrics) {
    say!("max_step_jump_tg_nm: {:.6e}", m.max_step_jump_tg);
    say!("max_step_jump_beta_rad: {:.6e}", m.max_step_jump_beta);
    say!("power_rmse_fullload_pu: {:.6e}", m.power_rmse_fullload);
    say!("lambda_rmse_partialload: {:.6e}", m.lambda_rmse_partialload);
    say!("tower_std_m: {:.6e}", m.tower_std);
    say!("transition_count: {}", m.transition_count);
    say!(
        "rows_partial_full_transition: {} {} {}",
        m.partial_rows,
        m.full_rows,
        m.transition_rows
    );
}

fn dump_controller(out: &Path, config: Option<&Path>) -> Result<(), Error> {
    let (partial, full) = match config {
        Some(path) => {
            let rs = load_config(path)?.resolve()?;
            let ctrl = build_controller(&rs)?;
            (ctrl.partial, ctrl.full)
        }
        None => {
            let params = TurbineParams::default();
            let aero = windloop::aero::AeroModel::empirical(params.lambda_opt, params.cp_max)?;
            design_default_controllers(&params, &aero, &Default::default())?
        }
    };
    controller_file::write(out, &partial, &full)?;
    say!("controller gains -> {}", out.display());
    Ok(())
}

fn validate(config: &Path) -> Result<(), Error> {
    let rs = load_config(config)?.resolve()?;
    // A configured gain file is part of the scenario's contract; load it now
    // so a broken reference surfaces here instead of at simulation time.
    if rs.controller_file.is_some() {
        build_controller(&rs)?;
    }
    say!(
        "ok: scenario {:?}, {:.3} s at dt {:.4} s, controller {:?}, wind {:?}",
        rs.name,
        rs.duration,
        rs.dt,
        rs.kind,
        rs.wind
    );
    Ok(())
}

fn plot_data(log_path: &Path, out: &Path) -> Result<(), Error> {
    let log = TimeSeriesLog::read_csv(log_path)?;
    let mut text = String::from("t, series, value\n");
    for row in &log.rows {
        let vals = [
            row.v,
            row.v_hat,
            row.omega_r,
            row.omega_ref_f,
            row.beta,
            row.beta_ref_tilde,
            row.t_g_tilde,
            row.p_g,
            row.x_t,
            row.x_i,
            row.h_a[0],
            row.h_a[1],
            row.h_a[2],
            row.h_a[3],
            row.f1,
            row.f2,
        ];
        for (name, v) in COLUMNS[1..].iter().zip(vals) {
            text.push_str(&format!("{:.9e}, {name}, {v:.9e}\n", row.t));
        }
    }
    std::fs::write(out, text)?;
    say!("long-format data -> {}", out.display());
    Ok(())
}

fn plot_script(out: &Path, log: &Path) -> Result<(), Error> {
    let log_name = log.display();
    let script = format!(
        "# gnuplot script: standard panels for a windloop simulation log\n\
         set datafile separator comma\n\
         set key autotitle columnhead\n\
         set multiplot layout 4,1 title \"windloop scenario\"\n\
         set xlabel \"t [s]\"\n\
         plot \"{log_name}\" using 1:2 with lines title \"v\", \
         \"\" using 1:3 with lines title \"v hat\"\n\
         plot \"{log_name}\" using 1:4 with lines title \"omega r\", \
         \"\" using 1:5 with lines title \"omega ref f\"\n\
         plot \"{log_name}\" using 1:8 with lines title \"T g tilde\", \
         \"\" using 1:($7*180/pi*1000) with lines title \"beta ref [mdeg]\"\n\
         plot \"{log_name}\" using 1:16 with lines title \"f1\", \
         \"\" using 1:17 with lines title \"f2\"\n\
         unset multiplot\n"
    );
    std::fs::write(out, script)?;
    say!("plot script -> {}", out.display());
    Ok(())
}
