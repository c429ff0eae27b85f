use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use passive_reflector::gridsim::{
    cdf, gain_report, reflector_size_curve, simulate, SampleRange, DEFAULT_OUTAGE_DBM,
};
use passive_reflector::raytrace::rt_grid;
use passive_reflector::error::ValidationErrors;
use passive_reflector::scenario_io::csv::{gain_summary, summary, write_grid_csv};
use passive_reflector::scenario_io::{explain_defaults, load_scenario_file, ResultBundle};
use passive_reflector::{Error, Result};

/// Received power in NLOS links with passive metallic reflectors.
#[derive(Debug, Parser)]
#[command(name = "reflector-sim", version)]
struct Cli {
    /// Print every scenario default with its origin and exit.
    #[arg(long, global = true)]
    explain_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a scenario and write the power map, CDF and summary.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-point loss breakdowns.
        #[arg(long)]
        verbose: bool,
    },
    /// Report the gain of a scenario over a baseline.
    Compare {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Outage threshold in dBm.
        #[arg(long, default_value_t = DEFAULT_OUTAGE_DBM, allow_negative_numbers = true)]
        threshold: f64,
    },
    /// Trace specular paths over the scenario grid.
    Raytrace {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// First-order power versus square reflector side length.
    SweepSize {
        #[arg(long)]
        scenario: PathBuf,
        /// Side lengths in metres as start:stop:step.
        #[arg(long, default_value = "0.1:0.9:0.05")]
        sizes: SampleRange,
    },
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Simulate {
            scenario,
            out,
            verbose,
        } => {
            let s = load_scenario_file(&scenario)?;
            let bundle = ResultBundle::run(&s, verbose)?;
            let written = bundle.write_to(&out)?;
            let mut text = summary(&bundle.name, &bundle.cdf, DEFAULT_OUTAGE_DBM);
            for p in written {
                text.push_str(&format!("wrote = {}\n", p.display()));
            }
            Ok(text)
        }
        Command::Compare {
            baseline,
            scenario,
            threshold,
        } => {
            let without = cdf(&simulate(&load_scenario_file(&baseline)?)?.samples())?;
            let with = cdf(&simulate(&load_scenario_file(&scenario)?)?.samples())?;
            Ok(gain_summary(&gain_report(&with, &without, threshold)))
        }
        Command::Raytrace { scenario, out } => {
            let s = load_scenario_file(&scenario)?;
            let env = s.environment.clone().unwrap_or_default();
            let grid = rt_grid(&env, &s)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.display().to_string(),
                message: e.to_string(),
            })?;
            let path = out.join("grid.csv");
            write_grid_csv(&grid, &path)?;
            Ok(format!("max_dbm = {:.6}\nwrote = {}\n", grid.max(), path.display()))
        }
        Command::SweepSize { scenario, sizes } => {
            let s = load_scenario_file(&scenario)?;
            let mut errors = ValidationErrors::default();
            sizes.validate("sizes", &mut errors);
            errors.into_result()?;
            let mut text = String::from("side_m,power_dbm\n");
            for (side, p) in reflector_size_curve(&s, &sizes.samples())? {
                text.push_str(&format!("{side:.6},{p:.6}\n"));
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.explain_defaults {
        print!("{}", explain_defaults());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required\n");
        eprintln!("{}", <Cli as clap::CommandFactory>::command().render_usage());
        return ExitCode::from(1);
    };
    match run(command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
