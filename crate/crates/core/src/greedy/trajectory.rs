use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem, Spin, VarId};
use crate::metrics::{RatioEstimate, RatioReference};
use crate::samplers::QaoaAngles;

use super::EngineConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Greedy,
    /// Exhaustive search over the last few active variables.
    BruteForceTail,
}

/// One iteration of the engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based iteration number.
    pub step: usize,
    pub kind: StepKind,
    pub variables: Vec<VarId>,
    pub spins: Vec<Spin>,
    pub n_active_before: usize,
    /// Mean cost of the selection samples, `None` for the exhaustive tail.
    pub mean_cost: Option<f64>,
    pub best_cost: Option<f64>,
    /// Ratio of `mean_cost` against the trajectory's reference.
    pub ratio: Option<f64>,
    pub best_ratio: Option<f64>,
    pub selection_angles: Option<QaoaAngles>,
    pub decision_angles: Option<QaoaAngles>,
    /// Samples dropped as infeasible before selection.
    pub filtered_out: usize,
    /// Every sample was infeasible, so the unfiltered batch was used.
    pub filter_fallback: bool,
    /// The cost-preferred spin was flipped to keep the constraints reachable.
    pub forced_by_constraint: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: EngineConfig,
    pub n_total: usize,
    pub reference: Option<RatioReference>,
    pub records: Vec<StepRecord>,
    pub final_bits: BitString,
    /// Cost of `final_bits` under the original problem.
    pub final_cost: f64,
    pub final_ratio: Option<RatioEstimate>,
    pub feasible: bool,
}

impl Trajectory {
    /// Applies the recorded freezes to `problem` in order and returns the
    /// offset of the fully reduced problem.
    pub fn replay(&self, problem: &IsingProblem) -> Result<f64> {
        let mut p = problem.clone();
        for r in &self.records {
            for (&k, &s) in r.variables.iter().zip(&r.spins) {
                p = p.freeze_variable(k, s)?;
            }
        }
        if p.n_active() != 0 {
            return Err(Error::InvalidParameter(format!(
                "trajectory leaves {} variables active",
                p.n_active()
            )));
        }
        Ok(p.offset())
    }

    /// Ratio of the mean sample cost at each greedy step.
    pub fn step_ratios(&self) -> Vec<(usize, f64)> {
        self.records.iter().filter_map(|r| r.ratio.map(|x| (r.step, x))).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header {
        config: EngineConfig,
        n_total: usize,
        reference: Option<RatioReference>,
    },
    Step(StepRecord),
    Final {
        bits: BitString,
        cost: f64,
        ratio: Option<RatioEstimate>,
        feasible: bool,
    },
}

/// One JSON object per line: a header, one line per step, then the result.
pub fn write_jsonl<W: Write>(t: &Trajectory, mut out: W) -> Result<()> {
    let header = Line::Header {
        config: t.config.clone(),
        n_total: t.n_total,
        reference: t.reference,
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for r in &t.records {
        writeln!(out, "{}", serde_json::to_string(&Line::Step(r.clone()))?)?;
    }
    let fin = Line::Final {
        bits: t.final_bits.clone(),
        cost: t.final_cost,
        ratio: t.final_ratio,
        feasible: t.feasible,
    };
    writeln!(out, "{}", serde_json::to_string(&fin)?)?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Trajectory> {
    let mut head = None;
    let mut records = Vec::new();
    let mut fin = None;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line)? {
            Line::Header { config, n_total, reference } => head = Some((config, n_total, reference)),
            Line::Step(r) => records.push(r),
            Line::Final { bits, cost, ratio, feasible } => fin = Some((bits, cost, ratio, feasible)),
        }
    }
    let bad = |what: &str| Error::InvalidParameter(format!("trajectory file has no {what} line"));
    let (config, n_total, reference) = head.ok_or_else(|| bad("header"))?;
    let (final_bits, final_cost, final_ratio, feasible) = fin.ok_or_else(|| bad("final"))?;
    Ok(Trajectory {
        config,
        n_total,
        reference,
        records,
        final_bits,
        final_cost,
        final_ratio,
        feasible,
    })
}
