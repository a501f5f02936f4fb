use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ising::{
    feasibility_reachable, feasibility_reachable_exact, IsingProblem, LinearConstraint, Spin, VarId,
};
use crate::samplers::{PackedSamples, SampleSet};

/// Selection scores `F_k` for every active variable, in ascending id order:
/// `F_k = (1/M) [ sum_{i != k} |w_ik sum_b Z_i Z_k| + |v_k sum_b Z_k| ]`.
pub fn selection_scores(problem: &IsingProblem, samples: &SampleSet) -> Result<Vec<(VarId, f64)>> {
    let d = problem.dense();
    let n = d.n();
    if n == 0 {
        return Err(Error::NoActiveVariables);
    }
    let packed = PackedSamples::new(&samples.samples, &d.ids);
    let m = packed.m() as f64;
    let mut f = vec![0.0; n];
    for a in 0..n {
        f[a] += (d.v[a] * packed.z_sum(a) as f64).abs();
        let row = d.row(a);
        for b in a + 1..n {
            if row[b] != 0.0 {
                let t = (row[b] * packed.zz_sum(a, b) as f64).abs();
                f[a] += t;
                f[b] += t;
            }
        }
    }
    Ok(d.ids.iter().zip(f).map(|(&id, x)| (id, x / m)).collect())
}

/// `argmax_k F_k`, ties to the smallest id.
pub fn select_variable(problem: &IsingProblem, samples: &SampleSet) -> Result<VarId> {
    Ok(select_top_k(problem, samples, 1)?[0])
}

/// The `k` variables with the largest `F_k` (ties to smaller ids), in
/// decreasing score order.
pub fn select_top_k(problem: &IsingProblem, samples: &SampleSet, k: usize) -> Result<Vec<VarId>> {
    let mut scores = selection_scores(problem, samples)?;
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scores.into_iter().take(k).map(|(id, _)| id).collect())
}

/// Sample means `<Z_i>` of the active variables, by id.
fn mean_spins(problem: &IsingProblem, samples: &SampleSet) -> BTreeMap<VarId, f64> {
    let ids = problem.active();
    let packed = PackedSamples::new(&samples.samples, &ids);
    let m = packed.m() as f64;
    ids.iter().enumerate().map(|(a, &id)| (id, packed.z_sum(a) as f64 / m)).collect()
}

/// Spins for `ks` minimizing the sample-averaged cost after overwriting their
/// bits in every sample. All `2^K` assignments are tried; ties go to the
/// assignment with the fewest leading `1` bits in `ks` order read as a binary
/// number, so a single-variable tie gives `+1`.
pub fn freeze_decision_k(problem: &IsingProblem, samples: &SampleSet, ks: &[VarId]) -> Result<Vec<Spin>> {
    if ks.is_empty() || ks.len() > 16 {
        return Err(Error::InvalidParameter(format!("cannot decide {} variables at once", ks.len())));
    }
    for (j, &k) in ks.iter().enumerate() {
        if !problem.is_active(k) {
            return Err(Error::NotActive(k));
        }
        if ks[..j].contains(&k) {
            return Err(Error::InvalidParameter(format!("variable {k} listed twice")));
        }
    }
    let z = mean_spins(problem, samples);
    // field from the variables outside the decided set
    let h: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let mut acc = problem.linear(k);
            for (&i, &zi) in &z {
                if !ks.contains(&i) {
                    acc += problem.coupling(i, k) * zi;
                }
            }
            acc
        })
        .collect();
    let kk = ks.len();
    let mut best = (f64::INFINITY, 0usize);
    for a in 0..1usize << kk {
        let spin = |j: usize| if (a >> (kk - 1 - j)) & 1 == 1 { -1.0 } else { 1.0 };
        let mut c = 0.0;
        for j in 0..kk {
            c += spin(j) * h[j];
            for l in j + 1..kk {
                c += problem.coupling(ks[j], ks[l]) * spin(j) * spin(l);
            }
        }
        if c < best.0 {
            best = (c, a);
        }
    }
    Ok((0..kk)
        .map(|j| Spin::from_bit(((best.1 >> (kk - 1 - j)) & 1) as u8))
        .collect())
}

/// `B_k = 1` iff `<C_1> < <C_0>`, i.e. iff `v_k + sum_i w_ik <Z_i>` is
/// positive; a tie keeps `B_k = 0`.
pub fn freeze_decision(problem: &IsingProblem, samples: &SampleSet, k: VarId) -> Result<Spin> {
    Ok(freeze_decision_k(problem, samples, &[k])?[0])
}

/// How the engine checks that a partial assignment can still be completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reachability {
    /// Enumerate the free constrained variables (up to 24 of them), falling
    /// back to the per-constraint test above that.
    #[default]
    Exact,
    /// Per-constraint test only.
    Relaxed,
}

const EXACT_REACH_CAP: usize = 24;

/// Whether `fixed` can still be completed to satisfy every constraint.
pub fn reachable(constraints: &[LinearConstraint], fixed: &BTreeMap<VarId, Spin>, mode: Reachability) -> bool {
    match mode {
        Reachability::Relaxed => feasibility_reachable(constraints, fixed),
        Reachability::Exact => match feasibility_reachable_exact(constraints, fixed, EXACT_REACH_CAP) {
            Ok(ok) => ok,
            Err(_) => {
                log::warn!("exact reachability over the cap; using the per-constraint test");
                feasibility_reachable(constraints, fixed)
            }
        },
    }
}

/// The cost-preferred spin from [`freeze_decision`], or its flip when the
/// preferred value makes the constraints unreachable. The flag reports a flip.
pub fn freeze_decision_constrained(
    problem: &IsingProblem,
    samples: &SampleSet,
    k: VarId,
    constraints: &[LinearConstraint],
    mode: Reachability,
) -> Result<(Spin, bool)> {
    let preferred = freeze_decision(problem, samples, k)?;
    if constraints.is_empty() {
        return Ok((preferred, false));
    }
    let mut fixed = problem.frozen().clone();
    for (spin, flipped) in [(preferred, false), (preferred.flipped(), true)] {
        fixed.insert(k, spin);
        if reachable(constraints, &fixed, mode) {
            return Ok((spin, flipped));
        }
    }
    Err(Error::InfeasibleTrajectory(k))
}
