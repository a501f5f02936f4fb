use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ising::{BitString, IsingProblem, Spin, VarId};

/// Outcome of one randomized greedy pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyRun {
    /// `u - sum_l |h_l|`.
    pub cost: f64,
    pub bits: BitString,
    pub order: Vec<VarId>,
    /// Local field `h_l = v_l + sum_{i earlier} w_il Z_i` met by each variable.
    pub fields: Vec<f64>,
}

/// Visits the active variables in random order and sets each spin against
/// its local field from the variables already set; a zero field gives `+1`.
pub fn classical_greedy_direct(problem: &IsingProblem, rng: &mut impl Rng) -> GreedyRun {
    let d = problem.dense();
    let n = d.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // h[a] accumulates v_a + sum of w_ab Z_b over the positions b already set
    let mut h = d.v.clone();
    let mut fields = Vec::with_capacity(n);
    let mut bits = BitString::zeros(problem.n_total());
    problem.fill_frozen(&mut bits);
    let mut cost = d.u;
    for &a in &order {
        let field = h[a];
        let z = if field > 0.0 { -1.0 } else { 1.0 };
        bits.set_spin(d.ids[a], Spin::from_value(z as i8).expect("z is +-1"));
        cost -= field.abs();
        fields.push(field);
        for (hb, &w) in h.iter_mut().zip(d.row(a)) {
            *hb += w * z;
        }
    }
    GreedyRun {
        cost,
        bits,
        order: order.into_iter().map(|a| d.ids[a]).collect(),
        fields,
    }
}

/// Mean randomized-greedy cost on large `+-1` rings, `-2n/3`.
pub fn greedy_ring_theory(n: usize) -> f64 {
    -2.0 * n as f64 / 3.0
}

/// Mean randomized-greedy cost on large random 3-regular `+-1` graphs, `-7n/8`.
pub fn greedy_3regular_theory(n: usize) -> f64 {
    -7.0 * n as f64 / 8.0
}
