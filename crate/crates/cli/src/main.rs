//! `freeprob`: runs the verification suites and writes JSON or CSV reports.
//!
//! Exit status: 0 when every verdict passes, 1 when any fails, 2 on invalid
//! usage or configuration.

mod config;
mod report;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{Format, RunConfig, Settings};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "freeprob", version, about = "Verification suites for free products of abelian algebras")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Free sum of two projection laws: atoms, moments, transform routes.
    Convolve,
    /// Exact trace of a word given as a JSON literal (--word).
    ExactTrace,
    /// Quadrature model of two free projections and their sign unitary.
    TwoProj,
    /// Freeness and generation of reassembled abelian factors.
    Reassemble,
    /// Radial algebra against a product of two sign unitaries.
    Radial,
    /// Unitaries built from sign functions against the even parts.
    WeakFc,
    /// Semicircular combinations along perpendicular directions.
    Semicircular,
    /// Every suite above, in order.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Convolve => "convolve",
            Command::ExactTrace => "exact-trace",
            Command::TwoProj => "two-proj",
            Command::Reassemble => "reassemble",
            Command::Radial => "radial",
            Command::WeakFc => "weak-fc",
            Command::Semicircular => "semicircular",
            Command::All => "all",
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FREEPROB_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).with_context(|| format!("FREEPROB_THREADS={v:?} is not a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn write_report(report: &Report, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => report.write_json(out),
        Format::Csv => report.write_csv(out),
    }
}

/// Returns whether every verdict passed.
fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let settings = file.overlay(cli.settings);
    let name = cli.command.name();
    let selected: Vec<&str> = if cli.command == Command::All { suites::ALL.to_vec() } else { vec![name] };
    let exact_only = selected.iter().all(|s| suites::is_exact_only(s));
    let cfg = RunConfig::resolve(name, settings, exact_only)?;

    let to_stdout = cfg.out.as_deref() == Some(Path::new("-"));
    let mut results = Vec::with_capacity(selected.len());
    for suite in selected {
        let result = suites::run_suite(suite, &cfg).with_context(|| format!("suite {suite}"))?;
        if to_stdout {
            eprintln!("{}", result.line());
        } else {
            println!("{}", result.line());
        }
        results.push(result);
    }
    let report = Report::new(cfg.clone(), results);
    match cfg.out.as_deref() {
        Some(p) if p == Path::new("-") => write_report(&report, cfg.format, &mut io::stdout().lock())?,
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            write_report(&report, cfg.format, &mut f)?;
            f.flush()?;
        }
        None => {}
    }
    Ok(report.verdict.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
