use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use gvlp::harness::{self, ExperimentConfig, ExperimentReport, ReportFormat, Verdict};
use gvlp::verify;

/// Runs the Gaussian variable-exponent experiments and reports verdicts.
#[derive(Debug, Parser)]
#[command(name = "gvlp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent (unless the config names one).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Doubles every quadrature order.
    #[arg(long, global = true)]
    refine: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regularity checks of the configured exponent.
    CheckExponent,
    /// Gaussian Luxemburg norms of the test suite.
    Norms,
    /// Norm ratios of T_t, T*, P_t and J_beta plus continuity curves.
    Semigroup,
    /// Invariants, coverage and overlap of the covering family.
    Covering,
    /// Every acceptance check at desk scale.
    VerifyAll,
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.refine {
        cfg = cfg.refined();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    Ok(match cli.command {
        Command::CheckExponent => verify::run_check_exponent(cfg)?,
        Command::Norms => harness::run_norms::<f64>(cfg)?,
        Command::Semigroup => {
            let mut r = harness::run_boundedness_experiment::<f64>(cfg)?;
            r.absorb(harness::run_continuity_experiment::<f64>(cfg)?);
            r
        }
        Command::Covering => verify::run_covering(cfg)?,
        Command::VerifyAll => {
            let start = Instant::now();
            let mut r = verify::verify_all(cfg)?;
            let secs = start.elapsed().as_secs_f64();
            eprintln!("verify-all finished in {secs:.1} s");
            r.verdicts.push(Verdict::new(Some(12), "verify-all within 5 minutes", secs <= 300.0));
            r
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|cfg| Ok((run(&cli, &cfg)?, cfg)));
    let (report, cfg) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for v in &report.verdicts {
        eprintln!("{}", v.line());
    }
    if let Some(flag) = report.hypotheses.as_ref().and_then(|h| h.flag.as_ref()) {
        eprintln!("note: {flag}");
    }
    let format = match cli.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    let out = cli.out.clone().or(cfg.out.as_ref().map(PathBuf::from));
    let written = match out {
        Some(path) => harness::emit_report(&report, format, &path).map_err(anyhow::Error::from),
        None => harness::render_report(&report, format).map_err(anyhow::Error::from).and_then(|b| {
            use std::io::Write;
            std::io::stdout().write_all(&b).map_err(anyhow::Error::from)
        }),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
