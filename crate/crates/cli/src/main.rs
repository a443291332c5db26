use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use wgqed::algebra::{Generator, TruncationRule};
use wgqed::config::Config;
use wgqed::sweep::{emit_outputs, preset, run_sweep, OutputFormat, SweepPlan, SweepRecord};
use wgqed::thle::eliminate_resonators;
use wgqed::validate::{run_suite, Suite};
use wgqed::{build_model, drive_from_intensity, Medium};

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Steady-state photon transmission through waveguide-QED lattices.
#[derive(Parser)]
#[command(name = "wgqed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
    /// Output formats (csv, ndjson); repeatable.
    #[arg(short, long = "format", default_value = "csv")]
    formats: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Also write a Vega-Lite plot script next to the data.
        #[arg(long)]
        plot: bool,
    },
    /// Recompute a built-in figure preset (fig1..fig6).
    Reproduce {
        figure: String,
        #[command(flatten)]
        output: OutputArgs,
        /// Skip the plot scripts.
        #[arg(long)]
        no_plot: bool,
    },
    /// Run a self-check suite: algebra-oracle, weak-drive, convergence,
    /// cross-method or all.
    Validate {
        suite: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the truncated equations of motion for a config.
    PrintEquations {
        config: PathBuf,
        /// Drive frequency (defaults to the first grid point).
        #[arg(long)]
        omega_p: Option<f64>,
        /// Input intensity (defaults to the first grid point).
        #[arg(long)]
        i_in: Option<f64>,
        /// Print the sparse matrix triplets instead of the equations.
        #[arg(long)]
        triplets: bool,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Validation(String),
    Numerical(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<wgqed::Error>() {
            Some(inner) if !inner.is_config() => Failure::Numerical(e),
            _ => Failure::Config(e),
        }
    }
}

fn formats(names: &[String]) -> Result<Vec<OutputFormat>> {
    names
        .iter()
        .map(|n| OutputFormat::parse(n).with_context(|| format!("unknown output format `{n}`")))
        .collect()
}

fn check_records(label: &str, records: &[SweepRecord]) -> Result<(), Failure> {
    let failed: Vec<&SweepRecord> = records.iter().filter(|r| r.diagnostics.error.is_some()).collect();
    if let Some(first) = failed.first() {
        return Err(Failure::Numerical(anyhow::anyhow!(
            "{label}: {} of {} points failed; first at omega_p={} i_in={} ({}): {}",
            failed.len(),
            records.len(),
            first.omega_p,
            first.i_in,
            first.method,
            first.diagnostics.error.as_deref().unwrap_or_default()
        )));
    }
    Ok(())
}

fn load_plan(path: &Path) -> Result<(Config, SweepPlan)> {
    let config = Config::load(path)?;
    let plan = SweepPlan::from_config(&config).with_context(|| format!("invalid config {}", path.display()))?;
    Ok((config, plan))
}

fn sweep(config: &Path, output: &OutputArgs, plot: bool) -> Result<(), Failure> {
    let fmts = formats(&output.formats).map_err(Failure::Config)?;
    let (_, plan) = load_plan(config)?;
    let records = run_sweep(&plan);
    let files = emit_outputs(&records, &output.out, &plan.label, &fmts, plot).map_err(anyhow::Error::from)?;
    for f in files {
        println!("{}", f.display());
    }
    check_records(&plan.label, &records)
}

fn reproduce(figure: &str, output: &OutputArgs, plot: bool) -> Result<(), Failure> {
    let fmts = formats(&output.formats).map_err(Failure::Config)?;
    let preset = preset(figure).map_err(anyhow::Error::from)?;
    let plans = preset.plans().map_err(anyhow::Error::from)?;
    let mut outcome = Ok(());
    for plan in plans {
        eprintln!("{}: {} points", plan.label, plan.len());
        let records = run_sweep(&plan);
        let files = emit_outputs(&records, &output.out, &plan.label, &fmts, plot).map_err(anyhow::Error::from)?;
        for f in files {
            println!("{}", f.display());
        }
        if outcome.is_ok() {
            outcome = check_records(&plan.label, &records);
        }
    }
    outcome
}

fn validate(name: &str, json: bool) -> Result<(), Failure> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(name).ok_or_else(|| {
            Failure::Config(anyhow::anyhow!(
                "unknown suite `{name}` (expected algebra-oracle, weak-drive, convergence, cross-method or all)"
            ))
        })?]
    };
    let mut failed = Vec::new();
    for suite in suites {
        let report = run_suite(suite).map_err(|e| Failure::Numerical(e.into()))?;
        if json {
            println!("{}", serde_json::to_string(&report).map_err(|e| Failure::Numerical(e.into()))?);
        } else {
            print!("{report}");
        }
        if !report.passed() {
            failed.push(suite.as_str());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("failed suites: {}", failed.join(", "))))
    }
}

fn print_equations(path: &Path, omega_p: Option<f64>, i_in: Option<f64>, triplets: bool) -> Result<(), Failure> {
    let (config, plan) = load_plan(path)?;
    let m = plan.m.context("config key `m`: missing (required to print equations)").map_err(Failure::Config)?;
    let model = build_model(&config).map_err(anyhow::Error::from)?;
    let w = omega_p.unwrap_or(plan.omega_p[0]);
    let i = i_in.unwrap_or(plan.i_in[0]);
    let drive = drive_from_intensity(&model, w, i).map_err(anyhow::Error::from)?;
    println!("# {} medium, N={}, m={m}, omega_p={w}, i_in={i}", model.medium().as_str(), model.n_sites());
    if triplets {
        let sys = wgqed::thle::assemble_linear_system(&model, &drive, m).map_err(anyhow::Error::from)?;
        print!("{}", sys.dump_triplets());
        return Ok(());
    }
    let elim = match model.medium() {
        Medium::Direct => None,
        Medium::SideCoupled => Some(eliminate_resonators(&model, &drive).map_err(anyhow::Error::from)?),
    };
    let generator = Generator::new(&model, &drive, elim.as_ref()).map_err(anyhow::Error::from)?;
    let trunc = TruncationRule::new(m).map_err(anyhow::Error::from)?;
    print!("{}", generator.dump(trunc).map_err(anyhow::Error::from)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep { config, output, plot } => sweep(&config, &output, plot),
        Command::Reproduce { figure, output, no_plot } => reproduce(&figure, &output, !no_plot),
        Command::Validate { suite, json } => validate(&suite, json),
        Command::PrintEquations {
            config,
            omega_p,
            i_in,
            triplets,
        } => print_equations(&config, omega_p, i_in, triplets),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
