//! The sample-driven greedy variable-freezing engine.
//!
//! Each iteration draws a batch of strings for the current reduced problem,
//! picks the variable whose terms carry the most sampled weight, fixes it to
//! the spin with the lower sample-averaged cost, and folds it into the
//! remaining coefficients.

mod decide;
mod sources;
mod trajectory;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{
    brute_force, brute_force_constrained, check_constraints, BitString, IsingProblem, LinearConstraint,
    BRUTE_FORCE_CAP, BRUTE_FORCE_MAX,
};
use crate::metrics::RatioReference;
use crate::mps::DEFAULT_CHI_MAX;
use crate::samplers::{rng_for, GridSpec, SampleSet};

pub use decide::{
    freeze_decision, freeze_decision_constrained, freeze_decision_k, reachable, select_top_k, select_variable,
    selection_scores, Reachability,
};
pub use sources::{FixedSource, MpsSource, SampleSource, SourceKind, StatevectorSource, UniformSource};
pub use trajectory::{read_jsonl, write_jsonl, StepKind, StepRecord, Trajectory};

/// What the per-step ratios are measured against.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RatioPolicy {
    /// Exhaustive extrema when at most 24 variables are active, else none.
    #[default]
    Auto,
    /// Exhaustive extrema; fails above the enumeration cap.
    Exact,
    /// Finite-size SK estimate for the number of active variables.
    SkProxy,
    /// Extrema supplied by the caller.
    Given { c_min: f64, c_max: f64 },
    Off,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Variables frozen per iteration.
    pub k: usize,
    pub selection: SourceKind,
    /// Source for the spin decision; the selection batch is reused when both
    /// kinds agree.
    pub decision: SourceKind,
    /// Strings per batch.
    pub m: usize,
    pub grid: GridSpec,
    pub chi_max: usize,
    /// Drop constraint-violating strings before selection and decision.
    pub filter_infeasible: bool,
    pub reachability: Reachability,
    /// Finish exhaustively once this many variables remain (0 disables).
    pub brute_force_threshold: usize,
    pub seed: u64,
    pub ratio: RatioPolicy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            k: 1,
            selection: SourceKind::Uniform,
            decision: SourceKind::Uniform,
            m: 256,
            grid: GridSpec::default(),
            chi_max: DEFAULT_CHI_MAX,
            filter_infeasible: false,
            reachability: Reachability::Exact,
            brute_force_threshold: 0,
            seed: 0,
            ratio: RatioPolicy::Auto,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k == 0 || self.k > 16 {
            return bad(format!("k must be in 1..=16, got {}", self.k));
        }
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        if self.grid.n_gamma == 0 || self.grid.n_beta == 0 {
            return bad("grid sizes must be positive".into());
        }
        if self.chi_max == 0 {
            return bad("chi_max must be positive".into());
        }
        if self.brute_force_threshold > BRUTE_FORCE_MAX {
            return bad(format!(
                "brute_force_threshold {} exceeds {BRUTE_FORCE_MAX}",
                self.brute_force_threshold
            ));
        }
        Ok(())
    }
}

const ROLE_SELECTION: u64 = 0;
const ROLE_DECISION: u64 = 1;

/// Seed for the batch drawn by `role` at iteration `step`.
pub fn step_seed(seed: u64, step: usize, role: u64) -> u64 {
    rng_for(seed, ((step as u64) << 2) | role).next_u64()
}

/// Runs the engine with the sources named in `config`.
pub fn run(problem: &IsingProblem, constraints: &[LinearConstraint], config: &EngineConfig) -> Result<Trajectory> {
    config.validate()?;
    let selection = sources::build(config.selection, config.grid, config.chi_max);
    let decision = (config.decision != config.selection)
        .then(|| sources::build(config.decision, config.grid, config.chi_max));
    run_with_sources(problem, constraints, config, selection.as_ref(), decision.as_deref())
}

fn resolve_reference(
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
    policy: RatioPolicy,
) -> Result<Option<RatioReference>> {
    let exact = || -> Result<Option<RatioReference>> {
        let bf = if constraints.is_empty() {
            Some(brute_force(problem, BRUTE_FORCE_CAP)?)
        } else {
            brute_force_constrained(problem, constraints, BRUTE_FORCE_CAP)?
        };
        match bf {
            Some(bf) if bf.c_min < bf.c_max => Ok(Some(RatioReference::exact(bf.c_min, bf.c_max)?)),
            _ => Ok(None),
        }
    };
    match policy {
        RatioPolicy::Auto if problem.n_active() <= BRUTE_FORCE_CAP => exact(),
        RatioPolicy::Auto | RatioPolicy::Off => Ok(None),
        RatioPolicy::Exact => exact(),
        RatioPolicy::SkProxy => Ok(Some(RatioReference::SkProxy { n: problem.n_active() })),
        RatioPolicy::Given { c_min, c_max } => Ok(Some(RatioReference::exact(c_min, c_max)?)),
    }
}

/// Drops strings that violate a constraint. Returns the batch, the number
/// dropped, and whether everything was infeasible (the batch is then kept).
fn filter_batch(
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
    set: SampleSet,
) -> Result<(SampleSet, usize, bool)> {
    let kept: Vec<BitString> = set
        .samples
        .iter()
        .filter(|b| check_constraints(constraints, b))
        .cloned()
        .collect();
    let dropped = set.len() - kept.len();
    if dropped == 0 {
        return Ok((set, 0, false));
    }
    if kept.is_empty() {
        log::warn!("every sample violates a constraint; using the unfiltered batch");
        return Ok((set, dropped, true));
    }
    let filtered = SampleSet::new(problem, kept, set.source, set.angles.clone())?;
    Ok((filtered, dropped, false))
}

/// Runs the engine with explicit sources. `decision = None` reuses the
/// selection batch for the spin decision.
pub fn run_with_sources(
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
    config: &EngineConfig,
    selection: &dyn SampleSource,
    decision: Option<&dyn SampleSource>,
) -> Result<Trajectory> {
    config.validate()?;
    if problem.n_active() == 0 {
        return Err(Error::NoActiveVariables);
    }
    if !constraints.is_empty() && config.k != 1 {
        return Err(Error::InvalidParameter("constrained runs freeze one variable at a time".into()));
    }
    let reference = resolve_reference(problem, constraints, config.ratio)?;
    let ratio_of = |c: f64| reference.map(|r| r.estimate(c).value);
    let filter = config.filter_infeasible && !constraints.is_empty();
    let mut p = problem.clone();
    let mut records = Vec::new();
    let mut step = 0;
    while p.n_active() > 0 {
        step += 1;
        let n_active_before = p.n_active();
        if n_active_before <= config.brute_force_threshold {
            let bf = if constraints.is_empty() {
                Some(brute_force(&p, BRUTE_FORCE_MAX)?)
            } else {
                brute_force_constrained(&p, constraints, BRUTE_FORCE_MAX)?
            };
            let vars = p.active();
            let bf = bf.ok_or(Error::InfeasibleTrajectory(vars[0]))?;
            let spins: Vec<_> = vars.iter().map(|&v| bf.argmin.spin(v)).collect();
            for (&v, &s) in vars.iter().zip(&spins) {
                p = p.freeze_variable(v, s)?;
            }
            records.push(StepRecord {
                step,
                kind: StepKind::BruteForceTail,
                variables: vars,
                spins,
                n_active_before,
                mean_cost: None,
                best_cost: None,
                ratio: None,
                best_ratio: None,
                selection_angles: None,
                decision_angles: None,
                filtered_out: 0,
                filter_fallback: false,
                forced_by_constraint: false,
            });
            break;
        }

        let drawn = selection.draw(&p, config.m, step_seed(config.seed, step, ROLE_SELECTION))?;
        let (sel, filtered_out, filter_fallback) = if filter {
            filter_batch(&p, constraints, drawn)?
        } else {
            (drawn, 0, false)
        };
        let ks = select_top_k(&p, &sel, config.k.min(n_active_before))?;
        let own;
        let dec = match decision {
            Some(d) => {
                let drawn = d.draw(&p, config.m, step_seed(config.seed, step, ROLE_DECISION))?;
                own = if filter { filter_batch(&p, constraints, drawn)?.0 } else { drawn };
                &own
            }
            None => &sel,
        };
        let (spins, forced_by_constraint) = if constraints.is_empty() {
            (freeze_decision_k(&p, dec, &ks)?, false)
        } else {
            let (s, forced) = freeze_decision_constrained(&p, dec, ks[0], constraints, config.reachability)?;
            (vec![s], forced)
        };
        let best_cost = sel.best(&p)?.0;
        let record = StepRecord {
            step,
            kind: StepKind::Greedy,
            variables: ks.clone(),
            spins: spins.clone(),
            n_active_before,
            mean_cost: Some(sel.mean_cost),
            best_cost: Some(best_cost),
            ratio: ratio_of(sel.mean_cost),
            best_ratio: ratio_of(best_cost),
            selection_angles: sel.angles.clone(),
            decision_angles: dec.angles.clone(),
            filtered_out,
            filter_fallback,
            forced_by_constraint,
        };
        log::debug!("step {step}: froze {ks:?} to {spins:?}");
        records.push(record);
        for (&k, &s) in ks.iter().zip(&spins) {
            p = p.freeze_variable(k, s)?;
        }
    }
    let mut final_bits = BitString::zeros(problem.n_total());
    p.fill_frozen(&mut final_bits);
    let final_cost = problem.evaluate_cost(&final_bits)?;
    Ok(Trajectory {
        config: config.clone(),
        n_total: problem.n_total(),
        reference,
        records,
        final_ratio: reference.map(|r| r.estimate(final_cost)),
        feasible: check_constraints(constraints, &final_bits),
        final_bits,
        final_cost,
    })
}
