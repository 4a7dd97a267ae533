use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use revaudit::features::FeatureSet;
use revaudit::pipeline::{write_plotdata, Figure, Pipeline, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "revaudit", version, about = "Peer-review corpus fairness audit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` run configuration.
    #[arg(long, global = true, env = "REVAUDIT_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Restrict to one feature set (base, plus_author, plus_rev, plus_revnlp, all).
    #[arg(long = "feature-set", global = true)]
    feature_set: Option<FeatureSet>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rerun stages even if their inputs are unchanged.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the raw tables and write a snapshot.
    Ingest,
    /// Resolve scholars, institutions, arXiv preprints and keywords.
    Link,
    /// Derive sensitive attributes, clusters and design matrices.
    Featurize,
    /// Fit the surrogate models and write the disparity reports.
    Audit,
    /// Write plot data for one figure from an audit bundle.
    Plotdata {
        /// marginal, roc, calibration or cdf.
        #[arg(long)]
        figure: String,
        /// Defaults to `<out>/bundle.json`.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(c.config.as_deref(), std::env::vars()).context("loading run configuration")?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(set) = c.feature_set {
        cfg.feature_sets = vec![set];
    }
    if let Some(out) = &c.out {
        cfg.out_dir = out.clone();
    }
    cfg.check()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.common)?;
    let stage = match &cli.command {
        Command::Ingest => Stage::Ingest,
        Command::Link => Stage::Link,
        Command::Featurize => Stage::Featurize,
        Command::Audit => Stage::Audit,
        Command::Plotdata { figure, bundle } => {
            let figure: Figure = figure.parse()?;
            let bundle = bundle.clone().unwrap_or_else(|| cfg.out_dir.join("bundle.json"));
            let out = cfg.out_dir.join("plotdata");
            let written = write_plotdata(&bundle, figure, &out)
                .with_context(|| format!("writing {figure} plot data from {}", bundle.display()))?;
            for p in written {
                println!("{}", p.display());
            }
            return Ok(());
        }
    };
    let mut pipeline = Pipeline::new(cfg);
    pipeline.force = cli.common.force;
    let ran = pipeline.run(stage)?;
    if ran.is_empty() {
        log::info!("nothing to do");
    }
    match stage {
        Stage::Ingest => {
            let path = pipeline.out.summary();
            let table = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            print!("{table}");
        }
        Stage::Audit => {
            let path = pipeline.out.report().join("data_disparity.csv");
            if let Ok(table) = std::fs::read_to_string(&path) {
                print!("{table}");
            }
            println!("bundle: {}", pipeline.out.bundle().display());
        }
        _ => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("REVAUDIT_LOG", "info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
