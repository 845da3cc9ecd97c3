//! `coverage` - fault-injection campaign runner.
//!
//! `coverage run` generates random inputs, injects butterfly/multiplier
//! faults per the selected mode, drives the protected pipelines, and emits
//! per-fault-count detection ratios as CSV, JSON, or markdown.
//! `coverage bench` reports the protected-versus-unprotected overhead.
//!
//! Campaigns are deterministic in the seed. Worker count is the only
//! environment knob (RAYON_NUM_THREADS); every other setting is a flag or a
//! JSON config field, with flags winning.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nttguard::{
    benchmark_overhead, emit_report, run_campaign, CampaignConfig, CorruptionModel, Error, Mode,
    ParamSet, ReportFormat, Scheme,
};

#[derive(Parser)]
#[command(name = "coverage", version, about = "Detection-coverage campaigns for protected transform pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a fault-injection campaign and emit a coverage report.
    Run(RunArgs),
    /// Measure protected-vs-unprotected overhead and static op counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file mirroring the campaign fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Protected pipeline: nwc-mult, nwc-pre, or kyber.
    #[arg(long)]
    scheme: Option<String>,

    /// Fault occurrence mode: normal or burst.
    #[arg(long)]
    mode: Option<String>,

    /// Comma-separated fault counts (normal) or burst labels.
    #[arg(long, value_delimiter = ',')]
    faults: Option<Vec<usize>>,

    /// Trials per fault count.
    #[arg(long)]
    samples: Option<usize>,

    /// Campaign seed; identical seeds replay bit-for-bit.
    #[arg(long)]
    seed: Option<u64>,

    /// Domain parameters: round1 (n=256, q=7681) or kyber (n=256, q=3329).
    #[arg(long)]
    params: Option<String>,

    /// Coding scalar alpha (defaults to the scheme's first valid pair).
    #[arg(long)]
    alpha: Option<u32>,

    /// Coding scalar beta.
    #[arg(long)]
    beta: Option<u32>,

    /// Fault value model: additive, random-value, or bitflip.
    #[arg(long)]
    corruption: Option<String>,

    /// Also expose the component-wise multiplier slots as fault sites
    /// (nwc-mult only; default is butterflies only).
    #[arg(long)]
    include_pointwise: bool,

    /// Output format: csv, json, or md (default csv).
    #[arg(long)]
    format: Option<String>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Scheme to measure: nwc-mult, nwc-pre, or kyber.
    #[arg(long)]
    scheme: String,

    /// Timed iterations per pipeline.
    #[arg(long, default_value_t = 1000)]
    iters: u32,

    /// Emit the summary as JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_scheme(s: &str) -> Result<Scheme, Error> {
    match s {
        "nwc-mult" => Ok(Scheme::NwcPointwise),
        "nwc-pre" => Ok(Scheme::NwcPreprocess),
        "kyber" => Ok(Scheme::KyberNtt),
        other => Err(Error::ConfigError(vec![format!(
            "scheme: unknown value {other:?} (expected nwc-mult, nwc-pre, or kyber)"
        )])),
    }
}

fn parse_mode(s: &str) -> Result<Mode, Error> {
    match s {
        "normal" => Ok(Mode::Normal),
        "burst" => Ok(Mode::Burst),
        other => Err(Error::ConfigError(vec![format!(
            "mode: unknown value {other:?} (expected normal or burst)"
        )])),
    }
}

fn parse_params(s: &str) -> Result<ParamSet, Error> {
    match s {
        "round1" => Ok(ParamSet::Round1),
        "kyber" => Ok(ParamSet::Kyber),
        other => Err(Error::ConfigError(vec![format!(
            "params: unknown value {other:?} (expected round1 or kyber)"
        )])),
    }
}

fn parse_corruption(s: &str) -> Result<CorruptionModel, Error> {
    match s {
        "additive" => Ok(CorruptionModel::Additive),
        "random-value" => Ok(CorruptionModel::RandomValue),
        "bitflip" => Ok(CorruptionModel::BitFlip),
        other => Err(Error::ConfigError(vec![format!(
            "corruption: unknown value {other:?} (expected additive, random-value, or bitflip)"
        )])),
    }
}

fn build_config(args: &RunArgs) -> Result<CampaignConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .map_err(|e| Error::ConfigError(vec![format!("config: {e}")]))?;
            serde_json::from_str::<CampaignConfig>(&body)
                .map_err(|e| Error::ConfigError(vec![format!("config: {e}")]))?
        }
        None => {
            let scheme = args.scheme.as_deref().ok_or_else(|| {
                Error::ConfigError(vec!["scheme: required (or provide --config)".into()])
            })?;
            CampaignConfig::new(parse_scheme(scheme)?)
        }
    };
    // flags win over config-file fields
    if let Some(s) = &args.scheme {
        cfg.scheme = parse_scheme(s)?;
    }
    if let Some(m) = &args.mode {
        cfg.mode = parse_mode(m)?;
    }
    if let Some(f) = &args.faults {
        cfg.fault_counts = f.clone();
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(p) = &args.params {
        cfg.params = Some(parse_params(p)?);
    }
    if let Some(a) = args.alpha {
        cfg.alpha = Some(a);
    }
    if let Some(b) = args.beta {
        cfg.beta = Some(b);
    }
    if let Some(c) = &args.corruption {
        cfg.corruption = parse_corruption(c)?;
    }
    if args.include_pointwise {
        cfg.include_pointwise = true;
    }
    Ok(cfg)
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let cfg = build_config(args)?;
    let format: ReportFormat = match &args.format {
        Some(f) => f
            .parse()
            .map_err(|e: String| Error::ConfigError(vec![format!("format: {e}")]))?,
        None => cfg.format.unwrap_or(ReportFormat::Csv),
    };
    let out = args.out.clone().or_else(|| cfg.out.clone());
    let report = run_campaign(&cfg)?;
    eprintln!(
        "campaign finished in {} ms ({} rows x {} samples)",
        report.wall_ms,
        report.rows.len(),
        cfg.samples
    );
    emit_report(&report, format, out.as_deref())
}

fn bench(args: &BenchArgs) -> Result<(), Error> {
    let summary = benchmark_overhead(parse_scheme(&args.scheme)?, args.iters)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?
        );
        return Ok(());
    }
    let c = &summary.static_counts;
    println!("scheme: {}", summary.scheme);
    println!("iterations: {}", summary.iterations);
    println!(
        "unprotected: {} ns/iter, protected: {} ns/iter, overhead x{:.3}",
        summary.unprotected_ns / summary.iterations as u64,
        summary.protected_ns / summary.iterations as u64,
        summary.overhead_ratio
    );
    println!("static counts per execution:");
    println!("  base butterflies:  {}", c.base_butterflies);
    println!("  encoder:           {} adds, {} scalings", c.encoder_adds, c.encoder_scalings);
    println!("  decoder:           {} mults, {} adds", c.decoder_mults, c.decoder_adds);
    println!("  checksum:          {} adds, {} mults", c.checksum_adds, c.checksum_mults);
    println!("  recompute mults:   {}", c.recompute_mults);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::ConfigError(_) | Error::InvalidFaultCount { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
