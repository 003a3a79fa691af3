use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rbswipt::config::DEFAULTS;
use rbswipt::sweep::{csv_string, emit_csv, emit_plot_data, OutputColumn};
use rbswipt::{evaluate_link, evaluate_safety, run_sweep, Error, Scenario, SweepSpec};

/// Evaluate a resonant-beam power and data link, or sweep one parameter.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Configuration file of `key = value unit` overrides on the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep `axis:min:max:steps`, axis one of R_M2, l_s, d, P_in.
    #[arg(long)]
    sweep: Option<String>,
    /// Write sweep rows (or the single operating point) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG plot of the sweep.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print the built-in default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    /// Print the eye-safety report for the configured pump power.
    #[arg(long)]
    safety: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

fn run(args: &Args) -> Result<(), Error> {
    if args.print_defaults {
        print!("{DEFAULTS}");
        return Ok(());
    }
    let scenario = match &args.config {
        Some(path) => Scenario::load(path).map_err(as_config_error)?,
        None => Scenario::parse("", None)?,
    };
    let params = &scenario.params;

    if args.safety {
        println!("{}", evaluate_safety(params)?);
    }

    let sweep = match &args.sweep {
        Some(text) => Some(SweepSpec::parse(text)?),
        None => scenario.sweep,
    };
    let Some(sweep) = sweep else {
        if args.safety && args.csv.is_none() {
            return Ok(());
        }
        let result = evaluate_link(params)?;
        if let Some(path) = &args.csv {
            let row = rbswipt::SweepRow {
                value: params.pump_power,
                result: result.clone(),
            };
            emit_csv(&[row], path)?;
        }
        println!("{result}");
        return Ok(());
    };

    let rows = run_sweep(params, &sweep)?;
    let columns = scenario.outputs.as_deref().unwrap_or(&OutputColumn::DEFAULT_PLOT);
    if let Some(path) = &args.csv {
        emit_csv(&rows, path)?;
    }
    if let Some(path) = &args.svg {
        emit_plot_data(&rows, sweep.axis, columns, path)?;
    }
    if args.csv.is_none() && args.svg.is_none() {
        print!("{}", csv_string(&rows)?);
    } else {
        eprintln!("{} rows over {}", rows.len(), sweep.axis.name());
    }
    Ok(())
}

/// A config file that cannot be read is a configuration problem.
fn as_config_error(e: Error) -> Error {
    match e {
        Error::Io { path, source } => Error::Config {
            line: 0,
            msg: format!("{}: {source}", path.display()),
        },
        other => other,
    }
}
