//! `horde` — config-driven experiment runner.
//!
//! Subcommands: `run` executes a seeded experiment and writes CSV outputs,
//! `compare` significance-tests two policies from an output directory, and
//! `curves` prints plot-ready learning-curve data.

use clap::{Parser, Subcommand};
use horde_shaping::harness::{self, outputs, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Parser)]
#[command(name = "horde", version, about = "Reward-shaping ensemble experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and emit curves/summary/comparisons CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker thread count (defaults to the number of cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Print per-run progress to stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Welch-test two policies' per-run summed returns from an output dir.
    Compare {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Emit plot-ready mean/stderr curve data for selected policies.
    Curves {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated policy ids (defaults to all).
        #[arg(long)]
        policies: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // one machine-readable error line on stderr
            let message = err
                .to_string()
                .replace('\\', "\\\\")
                .replace('"', "\\\"")
                .replace('\n', "\\n");
            eprintln!("{{\"error\":\"{message}\"}}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> horde_shaping::Result<()> {
    match cmd {
        Command::Run {
            config,
            out,
            seed,
            workers,
            progress,
        } => run(config, out, seed, workers, progress),
        Command::Compare { input, a, b } => compare(input, &a, &b),
        Command::Curves { input, policies } => curves(input, policies),
    }
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    progress: bool,
) -> horde_shaping::Result<()> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    let out_dir = out
        .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
        .ok_or_else(|| {
            horde_shaping::Error::config("output_dir", "pass --out or set output_dir in the config")
        })?;

    let done = AtomicUsize::new(0);
    let progress_cb = move |_run: usize, total: usize| {
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!("run {n}/{total} finished");
    };
    let callback: Option<&(dyn Fn(usize, usize) + Sync)> =
        if progress { Some(&progress_cb) } else { None };

    let result = harness::run_experiment_with_progress(&cfg, workers, callback)?;
    outputs::emit_outputs(&result, &out_dir)?;
    println!(
        "wrote {} policies x {} runs x {} checkpoints to {}",
        result.curves.len(),
        cfg.runs,
        cfg.checkpoints(),
        out_dir.display()
    );
    for s in &result.summaries {
        println!(
            "{:>28}  mean_sum_return {:12.2}  stderr {:8.2}",
            s.policy, s.mean_sum_return, s.stderr
        );
    }
    Ok(())
}

fn compare(input: PathBuf, a: &str, b: &str) -> horde_shaping::Result<()> {
    let curves = outputs::read_curves(&input)?;
    let find = |id: &str| {
        curves
            .iter()
            .find(|c| c.policy == id)
            .ok_or_else(|| horde_shaping::Error::MissingPolicy { id: id.to_string() })
    };
    let row = harness::compare_curves(find(a)?, find(b)?)?;
    println!(
        "{} vs {}: mean_a={} mean_b={} diff={} t={} df={} p={}",
        row.policy_a,
        row.policy_b,
        row.mean_a,
        row.mean_b,
        row.mean_a - row.mean_b,
        row.t,
        row.df,
        row.p
    );
    let verdict = if row.p > 0.05 {
        "statistically indistinguishable (p > 0.05)"
    } else if row.mean_a > row.mean_b {
        "a significantly better (p < 0.05)"
    } else {
        "b significantly better (p < 0.05)"
    };
    println!("{verdict}");
    Ok(())
}

fn curves(input: PathBuf, policies: Option<String>) -> horde_shaping::Result<()> {
    let curves = outputs::read_curves(&input)?;
    let ids: Vec<String> = match policies {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => curves.iter().map(|c| c.policy.clone()).collect(),
    };
    print!("{}", outputs::plot_blocks(&curves, &ids)?);
    Ok(())
}
