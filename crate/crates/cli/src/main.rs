//! `chaoscalc`: runs the chaos-calculus experiments and writes their reports.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 for
//! configuration or input errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use chaoscalc::experiments::{self, ExperimentConfig, Report};
use chaoscalc::{ChaosElement, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chaoscalc", version, about = "Wiener chaos Gamma-criterion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebraic identities against brute-force oracles.
    VerifyIdentities,
    /// Exact F(2) + F(4) split and a non-Gamma negative control.
    CramerDemo,
    /// Exponential/Bernoulli counterexample, sampled and in chaos form.
    Counterexample,
    /// Gamma-criterion distances along the (1 - 1/k) family.
    Asymptotic,
    /// Moments and Gamma criterion of a chaos element read from a file.
    Analyze {
        file: PathBuf,
        /// Target parameter; defaults to half the variance.
        #[arg(long)]
        nu: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Options {
    #[arg(long, global = true, env = "CHAOSCALC_SEED", default_value_t = experiments::DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo sample size.
    #[arg(long, global = true, default_value_t = experiments::DEFAULT_SAMPLES)]
    n: usize,
    /// Truncation level of the sign expansion.
    #[arg(long, global = true, default_value_t = experiments::DEFAULT_TRUNCATION)]
    k: usize,
    /// Basis dimension for randomized checks.
    #[arg(long, global = true, default_value_t = 3)]
    dim: usize,
    /// Largest chaos order any operation may produce.
    #[arg(long, global = true, default_value_t = chaoscalc::DEFAULT_MAX_ORDER)]
    q_max: usize,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Disable data-parallel loops.
    #[arg(long, global = true)]
    sequential: bool,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("bad tolerance value {value:?}: {e}"))?;
    Ok((name.trim().to_string(), v))
}

impl Options {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed,
            n_samples: self.n,
            dimension: self.dim,
            q_max: self.q_max,
            truncation: self.k,
            tolerances: self.tol.iter().cloned().collect::<BTreeMap<_, _>>(),
            exec: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let cfg = cli.opts.config();
    let report = match &cli.command {
        Command::VerifyIdentities => experiments::verify_identities(&cfg)?,
        Command::CramerDemo => experiments::cramer_demo(&cfg)?,
        Command::Counterexample => experiments::counterexample(&cfg)?,
        Command::Asymptotic => experiments::asymptotic(&cfg)?,
        Command::Analyze { file, nu } => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let element: ChaosElement = text.parse().with_context(|| format!("parsing {}", file.display()))?;
            experiments::analyze(&element, *nu, &cfg)?
        }
    };
    Ok(report)
}

fn table_path(out: &Path, table: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.{table}.csv"))
}

fn emit(report: &Report, opts: &Options) -> anyhow::Result<()> {
    match (opts.format, &opts.out) {
        (Format::Json, None) => println!("{}", report.to_json()),
        (Format::Json, Some(path)) => fs::write(path, report.to_json() + "\n")?,
        (Format::Csv, None) => {
            print!("{}", report.checks_csv());
            for name in report.tables.keys() {
                print!("\n{}", report.table_csv(name).unwrap_or_default());
            }
        }
        (Format::Csv, Some(path)) => {
            if path.is_dir() {
                bail!("{} is a directory", path.display());
            }
            fs::write(path, report.checks_csv())?;
            for name in report.tables.keys() {
                fs::write(table_path(path, name), report.table_csv(name).unwrap_or_default())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &cli.opts) {
        eprintln!("error: writing report: {e:#}");
        return ExitCode::from(2);
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!(
                "FAILED {}: measured {:e}, {} {:e}",
                c.name,
                c.measured,
                match c.comparison {
                    experiments::Comparison::Above => "required above",
                    _ => "allowed at most",
                },
                c.tolerance.unwrap_or(f64::NAN)
            );
            ExitCode::from(1)
        }
    }
}
