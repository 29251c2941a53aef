use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use spoofsim::harness::{default_estimators, parse_estimator_list, plot_script, run_sweep, save_csv, TrialPlan};
use spoofsim::scenario::{build_reference_scenario, Experiment, FigurePreset};

const DEFAULT_SNAPSHOTS: usize = 1024;

#[derive(Parser)]
#[command(name = "spoofsim", version, about = "Channel estimation under pilot spoofing: Monte Carlo sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure sweep and write one CSV row per (sweep value, estimator).
    Run(RunArgs),
    /// Print a figure preset as a TOML config file.
    DumpConfig {
        #[arg(long)]
        figure: FigurePreset,
        /// Write to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    figure: FigurePreset,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML experiment replacing the preset scenario and grid.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated subset of lse,mle,mmse,mmse-smi,mmse-sub,lmmse-naive,lmmse-improved.
    #[arg(long)]
    estimators: Option<String>,
    /// Downlink SNR in dB (default: equal to the uplink SNR of Bob 1).
    #[arg(long = "snr-dl")]
    snr_dl: Option<f64>,
    /// Snapshot count for mmse-smi/mmse-sub when neither the sweep nor the
    /// config file fixes one.
    #[arg(long)]
    q: Option<usize>,
    /// Add `<estimator>-passive` rows with every spoofer silenced.
    #[arg(long)]
    passive_baseline: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    emit_plot_script: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let experiment = match &args.config {
        Some(path) => Experiment::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => build_reference_scenario(args.figure, &BTreeMap::new())?,
    };
    let estimators = match &args.estimators {
        Some(list) => parse_estimator_list(list)?,
        None => default_estimators(args.figure),
    };
    let mut plan = TrialPlan::new(args.seed, args.trials, estimators);
    plan.snr_dl_db = args.snr_dl;
    plan.q_snapshots = Some(args.q.unwrap_or(DEFAULT_SNAPSHOTS));
    plan.passive_baseline = args.passive_baseline;
    plan.threads = args.threads;

    let result = run_sweep(&experiment, &plan)?;
    save_csv(&result, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    let failures: usize = result.rows.iter().map(|r| r.failures).sum();
    eprintln!(
        "wrote {} rows to {} ({} estimator failures)",
        result.rows.len(),
        args.out.display(),
        failures
    );

    if args.emit_plot_script {
        let script_path = args.out.with_extension("gp");
        let csv_name = args
            .out
            .file_name()
            .and_then(|n| n.to_str())
            .context("output path has no file name")?;
        std::fs::write(&script_path, plot_script(&result, csv_name))
            .with_context(|| format!("writing {}", script_path.display()))?;
        eprintln!("wrote plot script {}", script_path.display());
    }
    Ok(())
}

fn dump(figure: FigurePreset, out: Option<&Path>) -> Result<()> {
    let text = build_reference_scenario(figure, &BTreeMap::new())?.to_toml()?;
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            if args.trials == 0 {
                bail!("--trials must be at least 1");
            }
            run(args)
        }
        Command::DumpConfig { figure, out } => dump(figure, out.as_deref()),
    }
}
