use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qegreedy::baselines::{classical_greedy_direct, sdp_spectral_round, simulated_annealing, AnnealSchedule};
use qegreedy::greedy::{self, RatioPolicy};
use qegreedy::ising::{
    brute_force, brute_force_constrained, check_constraints, BitString, IsingProblem, LinearConstraint,
    BRUTE_FORCE_CAP,
};
use qegreedy::metrics::{RatioReference, RunResult};
use qegreedy::samplers::{rng_for, uniform_bitstrings};

use crate::config::{ExperimentConfig, Family, MethodSpec, RatioChoice};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: usize,
    pub seed_offset: u64,
    pub resume: bool,
}

/// Completed cells of one experiment directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub seed_offset: u64,
    pub total_cells: usize,
    pub completed: BTreeSet<String>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Option<Manifest>, CliError> {
        let path = dir.join(MANIFEST);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path)?;
        Ok(Some(serde_json::from_str(&text).map_err(|e| {
            CliError::Runtime(format!("{}: {e}", path.display()))
        })?))
    }

    fn save(&self, dir: &Path) -> Result<(), CliError> {
        write_atomic(&dir.join(MANIFEST), serde_json::to_string_pretty(self).expect("manifest serializes").as_bytes())
    }
}

/// One solver run, as stored in `runs/<method>/n<N>_s<seed>.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    #[serde(flatten)]
    pub run: RunResult,
    pub feasible: bool,
    pub bits: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Cell {
    n: usize,
    seed: u64,
    method: usize,
}

fn cell_id(method: &str, n: usize, seed: u64) -> String {
    format!("{method}/n{n}_s{seed}")
}

pub fn run_path(out: &Path, method: &str, n: usize, seed: u64) -> PathBuf {
    out.join("runs").join(method).join(format!("n{n}_s{seed}.json"))
}

pub fn trajectory_path(out: &Path, method: &str, n: usize, seed: u64) -> PathBuf {
    out.join("trajectories").join(method).join(format!("n{n}_s{seed}.jsonl"))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// The part of the configuration that determines results.
fn fingerprint(cfg: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        out: None,
        jobs: 1,
        ..cfg.clone()
    }
}

pub struct RunSummary {
    pub total: usize,
    pub executed: usize,
    pub skipped: usize,
}

/// Runs every pending `(method, n, seed)` cell, then writes the reports.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    fs::create_dir_all(&opts.out)?;
    let seeds: Vec<u64> = (0..cfg.seeds.count).map(|i| cfg.seeds.start + i + opts.seed_offset).collect();
    let mut cells = Vec::new();
    for &n in &cfg.sizes {
        for &seed in &seeds {
            for method in 0..cfg.methods.len() {
                cells.push(Cell { n, seed, method });
            }
        }
    }
    let fresh = Manifest {
        config: fingerprint(cfg),
        seed_offset: opts.seed_offset,
        total_cells: cells.len(),
        completed: BTreeSet::new(),
    };
    let manifest = match Manifest::load(&opts.out)? {
        Some(m) if m.config == fresh.config && m.seed_offset == opts.seed_offset => m,
        Some(_) => {
            return Err(CliError::Config(format!(
                "{} holds results of a different experiment",
                opts.out.display()
            )))
        }
        None if opts.resume => {
            return Err(CliError::Config(format!("nothing to resume in {}", opts.out.display())))
        }
        None => fresh,
    };
    manifest.save(&opts.out)?;
    let pending: Vec<Cell> = cells
        .into_iter()
        .filter(|c| {
            let name = cfg.methods[c.method].name();
            !(manifest.completed.contains(&cell_id(name, c.n, c.seed))
                && run_path(&opts.out, name, c.n, c.seed).exists())
        })
        .collect();
    let total = manifest.total_cells;
    let executed = pending.len();
    log::info!("{}: {executed} of {total} cells to run", cfg.name);

    // cells of one instance share the generated problem and its reference
    let mut instances: Vec<(usize, u64, Vec<usize>)> = Vec::new();
    for c in &pending {
        match instances.last_mut() {
            Some((n, s, ms)) if *n == c.n && *s == c.seed => ms.push(c.method),
            _ => instances.push((c.n, c.seed, vec![c.method])),
        }
    }
    let manifest = Mutex::new(manifest);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    pool.install(|| {
        instances.par_iter().try_for_each(|(n, seed, methods)| -> Result<(), CliError> {
            let (problem, constraints) = cfg.family.generate(*n, *seed)?;
            let reference = reference_for(cfg, &problem, &constraints)?;
            for &mi in methods {
                let spec = &cfg.methods[mi];
                let cell = run_cell(cfg, spec, &problem, &constraints, reference, *seed, &opts.out)?;
                write_atomic(
                    &run_path(&opts.out, spec.name(), *n, *seed),
                    serde_json::to_string_pretty(&cell).expect("result serializes").as_bytes(),
                )?;
                let mut m = manifest.lock().expect("manifest lock");
                m.completed.insert(cell_id(spec.name(), *n, *seed));
                m.save(&opts.out)?;
            }
            Ok(())
        })
    })?;
    crate::report::write_reports(&opts.out)?;
    Ok(RunSummary {
        total,
        executed,
        skipped: total - executed,
    })
}

fn reference_for(
    cfg: &ExperimentConfig,
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
) -> qegreedy::Result<Option<RatioReference>> {
    let n = problem.n_active();
    let exact = || -> qegreedy::Result<Option<RatioReference>> {
        let bf = if constraints.is_empty() {
            Some(brute_force(problem, BRUTE_FORCE_CAP)?)
        } else {
            brute_force_constrained(problem, constraints, BRUTE_FORCE_CAP)?
        };
        Ok(bf
            .filter(|b| b.c_min < b.c_max)
            .map(|b| RatioReference::Exact { c_min: b.c_min, c_max: b.c_max }))
    };
    match cfg.ratio {
        RatioChoice::None => Ok(None),
        RatioChoice::Exact => exact(),
        RatioChoice::SkProxy => Ok(Some(RatioReference::SkProxy { n })),
        RatioChoice::Auto if n <= BRUTE_FORCE_CAP => exact(),
        RatioChoice::Auto if cfg.family == Family::Sk => Ok(Some(RatioReference::SkProxy { n })),
        RatioChoice::Auto => Ok(None),
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    spec: &MethodSpec,
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
    reference: Option<RatioReference>,
    seed: u64,
    out: &Path,
) -> Result<CellResult, CliError> {
    let n = problem.n_total();
    let start = Instant::now();
    let bits = match spec {
        MethodSpec::Engine { name, engine } => {
            let mut e = engine.clone();
            e.seed = e.seed.wrapping_add(seed);
            e.ratio = match reference {
                Some(RatioReference::Exact { c_min, c_max }) => RatioPolicy::Given { c_min, c_max },
                Some(RatioReference::SkProxy { .. }) => RatioPolicy::SkProxy,
                None => RatioPolicy::Off,
            };
            let t = greedy::run(problem, constraints, &e)?;
            let mut buf = Vec::new();
            greedy::write_jsonl(&t, &mut buf)?;
            write_atomic(&trajectory_path(out, name, n, seed), &buf)?;
            t.final_bits
        }
        MethodSpec::ClassicalGreedy { .. } => classical_greedy_direct(problem, &mut rng_for(seed, 1)).bits,
        MethodSpec::Spectral { .. } => sdp_spectral_round(problem)?.bits,
        MethodSpec::Annealing { sweeps, .. } => {
            let mut schedule = AnnealSchedule::default_for(problem);
            if let Some(s) = sweeps {
                schedule.sweeps = *s;
            }
            simulated_annealing(problem, schedule, &mut rng_for(seed, 2))?.best_bits
        }
        MethodSpec::RandomBest { m, .. } => {
            let strings = uniform_bitstrings(n, *m, &mut rng_for(seed, 3));
            // prefer feasible strings when there are constraints
            let feasible = strings.iter().filter(|b| check_constraints(constraints, b));
            let pool: Vec<&BitString> = if feasible.clone().next().is_some() {
                feasible.collect()
            } else {
                strings.iter().collect()
            };
            let mut best: Option<(f64, &BitString)> = None;
            for b in pool {
                let c = problem.evaluate_cost(b)?;
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, b));
                }
            }
            best.expect("m is positive").1.clone()
        }
        MethodSpec::BruteForce { .. } => {
            let bf = if constraints.is_empty() {
                Some(brute_force(problem, BRUTE_FORCE_CAP)?)
            } else {
                brute_force_constrained(problem, constraints, BRUTE_FORCE_CAP)?
            };
            bf.ok_or_else(|| CliError::Runtime(format!("instance n = {n}, seed = {seed} has no feasible assignment")))?
                .argmin
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let cost = problem.evaluate_cost(&bits)?;
    let estimate = reference.map(|r| r.estimate(cost));
    Ok(CellResult {
        run: RunResult {
            method: spec.name().to_string(),
            family: cfg.family.as_str().to_string(),
            n,
            seed,
            cost,
            ratio: estimate.map(|e| e.value),
            mode: estimate.map(|e| e.mode),
            wall_seconds,
        },
        feasible: check_constraints(constraints, &bits),
        bits,
    })
}

/// Reads every stored cell result under `out`, sorted by `(method, n, seed)`.
pub fn load_results(out: &Path) -> Result<Vec<CellResult>, CliError> {
    let runs = out.join("runs");
    let mut results = Vec::new();
    if !runs.is_dir() {
        return Ok(results);
    }
    for method in fs::read_dir(&runs)? {
        let method = method?.path();
        if !method.is_dir() {
            continue;
        }
        for f in fs::read_dir(&method)? {
            let f = f?.path();
            if f.extension().is_some_and(|e| e == "json") {
                let text = fs::read_to_string(&f)?;
                let r: CellResult = serde_json::from_str(&text)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", f.display())))?;
                results.push(r);
            }
        }
    }
    results.sort_by(|a, b| (&a.run.method, a.run.n, a.run.seed).cmp(&(&b.run.method, b.run.n, b.run.seed)));
    Ok(results)
}
