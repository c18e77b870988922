//! `caplab <experiment> --config <file.json> [--seed N] [--out DIR] [--format csv|json]`
//!
//! Exit status: 0 when every verdict passes, 1 when any fails, 2 for a
//! configuration error. Wall time is printed to stderr only, so that report
//! files stay byte-identical between runs.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use caplab::lab::{emit_report, run_experiment, ExperimentConfig, ExperimentKind, OutputFormat, Report};
use clap::Parser;

#[derive(Parser, Debug)]
#[command(name = "caplab", version, about = "Capacity experiments under linear maps")]
struct Cli {
    /// Experiment name, e.g. theorem_log, polya-schiffer or verify-all.
    experiment: String,
    /// JSON experiment configuration (optional for verify-all).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the random matrix sweep.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; the report goes to stdout when neither this nor the
    /// config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: caplab::Error| e.to_string())
}

/// Failure classes that map to distinct exit codes.
enum Failure {
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl From<caplab::Error> for Failure {
    fn from(e: caplab::Error) -> Self {
        if e.is_configuration() {
            Failure::Config(e.into())
        } else {
            Failure::Other(e.into())
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("CAPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("CAPLAB_THREADS={raw:?} is not a thread count"))?;
    if n == 0 {
        bail!("CAPLAB_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let kind: ExperimentKind = cli.experiment.parse()?;
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::read(path)?,
        None if kind == ExperimentKind::VerifyAll => ExperimentConfig::new(kind),
        None => return Err(Failure::Config(anyhow!("configuration error: {kind} needs --config <file.json>"))),
    };
    if cfg.experiment != kind {
        return Err(Failure::Config(anyhow!(
            "configuration error: command line asks for {kind} but the config describes {}",
            cfg.experiment
        )));
    }
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    Ok(cfg)
}

fn emit(cli: &Cli, cfg: &ExperimentConfig, report: &Report) -> Result<(), Failure> {
    let output = cfg.output.clone().unwrap_or_default();
    let format = cli.format.or(output.format).unwrap_or_default();
    match cli.out.clone().or(output.path) {
        Some(dir) => {
            let path = emit_report(report, &dir, format).map_err(|e| Failure::Config(e.into()))?;
            println!("{}", path.display());
        }
        None => match format {
            OutputFormat::Json => print!("{}", report.to_json_string()?),
            OutputFormat::Csv => print!("{}", report.to_csv_string()?),
        },
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    configure_threads().map_err(Failure::Config)?;
    let cfg = load_config(cli)?;
    let start = Instant::now();
    let report = run_experiment(&cfg)?;
    let elapsed = start.elapsed();
    emit(cli, &cfg, &report)?;
    for v in &report.verdicts {
        eprintln!(
            "{} {} (value {}, tolerance {:e})",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.value.map_or("-".to_string(), |x| format!("{x:e}")),
            v.tolerance
        );
    }
    if report.evidence {
        eprintln!("note: {} reports EVIDENCE, not proof", report.experiment);
    }
    eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("caplab: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("caplab: {e:#}");
            ExitCode::from(1)
        }
    }
}
