use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use qegreedy::ising::{save_problem, BRUTE_FORCE_CAP};
use qegreedy_cli::config::{ExperimentConfig, Family};
use qegreedy_cli::runner::{run_experiment, RunOptions};
use qegreedy_cli::{oracle, report, CliError};

#[derive(Parser)]
#[command(name = "qegreedy", version, about = "Sample-driven greedy Ising solver and experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (method, instance) cell of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `out`, then `results/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the config's `jobs`.
        #[arg(long)]
        jobs: Option<usize>,
        /// Added to every instance seed.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        /// Continue an interrupted run; fails if `--out` has no manifest.
        #[arg(long)]
        resume: bool,
    },
    /// Standalone verification commands; print JSON to stdout.
    Oracle {
        #[command(subcommand)]
        check: Oracle,
    },
    /// Rebuild tables and figure series from a run directory.
    Report {
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Exhaustive extrema of a problem file.
    BruteForce {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        cap: usize,
    },
    /// Cost-level multiplicities of a problem file.
    Spectrum {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        cap: usize,
    },
    /// Native-gate decompositions against their target unitaries.
    DecomposeCheck {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 500)]
        swap_count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// MPS against dense execution of the truncated ansatz.
    MpsDiff {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        gamma: f64,
        #[arg(long, default_value_t = 0.4)]
        beta: f64,
    },
    /// Write a generated instance as a problem file.
    Generate {
        /// sk, ring or three_regular
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn oracle(check: Oracle) -> Result<(), CliError> {
    let v = match check {
        Oracle::BruteForce { problem, cap } => oracle::brute_force_json(&problem, cap)?,
        Oracle::Spectrum { problem, cap } => oracle::spectrum_json(&problem, cap)?,
        Oracle::DecomposeCheck { count, swap_count, seed } => oracle::decompose_check(count, swap_count, seed)?,
        Oracle::MpsDiff { n, seed, gamma, beta } => oracle::mps_diff(n, seed, gamma, beta)?,
        Oracle::Generate { family, n, seed, out } => {
            let family: Family = serde_json::from_value(serde_json::json!({ "kind": family }))
                .map_err(|e| CliError::Config(e.to_string()))?;
            let (p, cs) = family.generate(n, seed)?;
            save_problem(&out, &p, &cs)?;
            serde_json::json!({ "written": out })
        }
    };
    print(&v);
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            seed_offset,
            resume,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = out
                .or_else(|| cfg.out.clone())
                .unwrap_or_else(|| PathBuf::from("results").join(&cfg.name));
            let opts = RunOptions {
                out,
                jobs: jobs.unwrap_or(cfg.jobs).max(1),
                seed_offset,
                resume,
            };
            let s = run_experiment(&cfg, &opts)?;
            eprintln!(
                "{}: ran {} cells, skipped {} of {} ({})",
                cfg.name,
                s.executed,
                s.skipped,
                s.total,
                opts.out.display()
            );
            Ok(())
        }
        Command::Oracle { check } => oracle(check),
        Command::Report { dir } => {
            let rows = report::write_reports(&dir)?;
            eprintln!("{} aggregate rows written to {}", rows.len(), dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
