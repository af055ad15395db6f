use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::BoolishValueParser;
use clap::{Args, Parser, Subcommand as ClapSubcommand};
use serde_json::json;

use dsaddle::bounds::Variant;
use dsaddle::experiments::{cmd_bounds, cmd_pdeco, cmd_synth_verify, error_json, RunConfig, Subcommand};
use dsaddle::indicators::GammaIndicators;
use dsaddle::inner::AmgMode;
use dsaddle::pdeopt::Observation;
use dsaddle::synthetic::GridPreset;
use dsaddle::{Error, Result};

/// Eigenvalue bounds and preconditioned MINRES for double saddle-point systems.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Verify the bounds on randomly generated systems.
    SynthVerify(Flags),
    /// Eigenvalue and iteration tables for the optimal-control benchmarks.
    Pdeco(Flags),
    /// Evaluate the bounds for explicit indicator values.
    Bounds(Flags),
}

#[derive(Args)]
struct Flags {
    /// Synthetic grid: full, ci, square-c or with-e.
    #[arg(long)]
    preset: Option<GridPreset>,
    /// Mesh levels k (h = 2^-k), comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u32>>,
    /// Regularization parameters, comma separated.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Chebyshev step counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    cheb_iters: Option<Vec<usize>>,
    /// full or boundary.
    #[arg(long)]
    observation: Option<Observation>,
    /// exact, sgs:<k> or two-grid.
    #[arg(long)]
    amg_mode: Option<AmgMode>,
    /// Repeats per synthetic grid cell.
    #[arg(long)]
    seeds: Option<usize>,
    /// Compute full spectra (on/off).
    #[arg(long, value_parser = BoolishValueParser::new())]
    eigens: Option<bool>,
    /// Output directory (overridden by DSADDLE_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// MINRES tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Indicator JSON, inline or a file path.
    #[arg(long)]
    indicators: Option<String>,
    /// Bound variants, comma separated.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<Variant>>,
}

fn parse_indicators(arg: &str) -> Result<GammaIndicators> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { std::fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

fn build_config(config: Option<PathBuf>, subcommand: Subcommand, f: Flags) -> Result<RunConfig> {
    let mut cfg = match config {
        Some(path) => RunConfig::load(&path)?,
        None => RunConfig::default(),
    };
    cfg.subcommand = subcommand;
    if let Some(v) = f.preset {
        cfg.preset = v;
    }
    if let Some(v) = f.levels {
        cfg.levels = v;
    }
    if let Some(v) = f.beta {
        cfg.betas = Some(v);
    }
    if let Some(v) = f.cheb_iters {
        cfg.cheb_iters = v;
    }
    if let Some(v) = f.observation {
        cfg.observation = v;
    }
    if let Some(v) = f.amg_mode {
        cfg.amg_mode = v;
    }
    if let Some(v) = f.seeds {
        cfg.seeds = Some(v);
    }
    if let Some(v) = f.eigens {
        cfg.eigens = v;
    }
    if let Some(v) = f.out {
        cfg.out = v;
    }
    if let Some(v) = f.workers {
        cfg.workers = Some(v);
    }
    if let Some(v) = f.tol {
        cfg.tol = v;
    }
    if let Some(v) = f.indicators {
        cfg.indicators = Some(parse_indicators(&v)?);
    }
    if let Some(v) = f.variants {
        cfg.variants = Some(v);
    }
    cfg.apply_env();
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (sub, flags) = match cli.command {
        Command::SynthVerify(f) => (Subcommand::SynthVerify, f),
        Command::Pdeco(f) => (Subcommand::Pdeco, f),
        Command::Bounds(f) => (Subcommand::Bounds, f),
    };
    let cfg = build_config(cli.config, sub, flags)?;
    match sub {
        Subcommand::SynthVerify => cmd_synth_verify(&cfg),
        Subcommand::Pdeco => cmd_pdeco(&cfg),
        Subcommand::Bounds => {
            let (doc, ok) = cmd_bounds(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?);
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json!({ "error": error_json(&e) }));
            ExitCode::from(2)
        }
    }
}
