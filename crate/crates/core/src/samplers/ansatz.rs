use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{rx_angle_matrix, Circuit, Gate};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, VarId};

use super::QaoaAngles;

/// One nearest-neighbour slot of a brick-wall layer, acting on line
/// positions `(pos, pos + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BondOp {
    pub pos: usize,
    /// Variables meeting here for the first time, if they do.
    pub meet: Option<(VarId, VarId)>,
    pub swap: bool,
}

/// One-layer QAOA restricted to a line: variables are placed at random, then
/// `2 * swap_cycles` brick-wall layers alternate even and odd bonds. Every
/// layer but the last swaps its pairs, and a problem edge is applied the first
/// time its two variables are neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedAnsatz {
    /// Variable at each line position before the first layer.
    pub placement: Vec<VarId>,
    /// Variable at each line position after the last layer; measured qubit
    /// `q` reports variable `final_placement[q]`.
    pub final_placement: Vec<VarId>,
    pub layers: Vec<Vec<BondOp>>,
    /// Distinct variable pairs made adjacent, as `(min, max)` in meeting order.
    pub edges: Vec<(VarId, VarId)>,
}

impl TruncatedAnsatz {
    pub fn new(problem: &IsingProblem, swap_cycles: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut placement = problem.active();
        placement.shuffle(rng);
        Self::with_placement(placement, swap_cycles)
    }

    pub fn with_placement(placement: Vec<VarId>, swap_cycles: usize) -> Result<Self> {
        if swap_cycles == 0 {
            return Err(Error::InvalidParameter("swap_cycles must be at least 1".into()));
        }
        let n = placement.len();
        let n_layers = 2 * swap_cycles;
        let mut at = placement.clone();
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            let swap = l + 1 < n_layers;
            let mut ops = Vec::new();
            for pos in (l % 2..n.saturating_sub(1)).step_by(2) {
                let (x, y) = (at[pos], at[pos + 1]);
                let key = (x.min(y), x.max(y));
                let meet = if seen.insert(key) {
                    edges.push(key);
                    Some((x, y))
                } else {
                    None
                };
                if swap {
                    at.swap(pos, pos + 1);
                }
                ops.push(BondOp { pos, meet, swap });
            }
            layers.push(ops);
        }
        Ok(TruncatedAnsatz {
            placement,
            final_placement: at,
            layers,
            edges,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.placement.len()
    }

    /// Abstract-gate circuit for `e^{i beta sum X} e^{i gamma C_trunc} H^n`,
    /// where `C_trunc` keeps the linear terms and the couplings on
    /// [`TruncatedAnsatz::edges`].
    pub fn circuit(&self, problem: &IsingProblem, angles: &QaoaAngles) -> Result<Circuit> {
        if angles.depth() != 1 {
            return Err(Error::InvalidParameter("the truncated ansatz has exactly one layer".into()));
        }
        let (g, b) = (angles.gamma[0], angles.beta[0]);
        let n = self.n_qubits();
        let mut c = Circuit::new(n);
        for q in 0..n {
            c.push(Gate::Hadamard { q })?;
        }
        for (q, &id) in self.placement.iter().enumerate() {
            let v = problem.linear(id);
            if v != 0.0 {
                c.push(Gate::Rz { theta: -2.0 * g * v, q })?;
            }
        }
        for layer in &self.layers {
            for op in layer {
                let (a, bq) = (op.pos, op.pos + 1);
                if let Some((x, y)) = op.meet {
                    let w = problem.coupling(x, y);
                    if w != 0.0 {
                        c.push(Gate::Rzz { phi: -2.0 * g * w, a, b: bq })?;
                    }
                }
                if op.swap {
                    c.push(Gate::Swap { a, b: bq })?;
                }
            }
        }
        let mixer = rx_angle_matrix(-2.0 * b);
        for q in 0..n {
            c.push(Gate::Unitary1q { m: mixer, q })?;
        }
        Ok(c)
    }

    /// The objective seen by the ansatz: the problem with every coupling off
    /// [`TruncatedAnsatz::edges`] removed.
    pub fn truncated_problem(&self, problem: &IsingProblem) -> Result<IsingProblem> {
        let mut t = problem.clone();
        let keep: BTreeSet<_> = self.edges.iter().copied().collect();
        for (i, j, w) in problem.couplings() {
            if !keep.contains(&(i, j)) {
                t.add_coupling(i, j, -w)?;
            }
        }
        Ok(t)
    }
}

/// Candidate adjacencies of a random line placement under the brick-wall swap
/// schedule.
pub fn truncated_ansatz_edges(
    problem: &IsingProblem,
    swap_cycles: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(VarId, VarId)>> {
    Ok(TruncatedAnsatz::new(problem, swap_cycles, rng)?.edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{apply_circuit, compile_to_native};
    use crate::ising::gen_sk;
    use crate::samplers::{rng_for, QaoaSimulator};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    #[test]
    fn small_sizes() {
        let a = TruncatedAnsatz::with_placement(vec![0, 1], 2).unwrap();
        assert_eq!(a.edges, vec![(0, 1)]);
        let a = TruncatedAnsatz::with_placement(vec![2, 0, 1], 2).unwrap();
        assert_eq!(a.edges.len(), 3);
        for n in 4..30 {
            let a = TruncatedAnsatz::with_placement((0..n).collect(), 2).unwrap();
            assert_eq!(a.edges.len(), 2 * (n - 1), "n = {n}");
        }
    }

    #[test]
    fn density_at_72() {
        let p = gen_sk(72, 0).unwrap();
        let e = truncated_ansatz_edges(&p, 2, &mut rng_for(0, 0)).unwrap();
        assert_eq!(e.len(), 142);
        assert!((e.len() as f64 / 2556.0 - 0.0556).abs() < 1e-3);
    }

    #[test]
    fn sqrt_iswap_count_at_72() {
        let p = gen_sk(72, 0).unwrap();
        let a = TruncatedAnsatz::new(&p, 2, &mut rng_for(1, 0)).unwrap();
        let c = a.circuit(&p, &QaoaAngles::p1(0.3, 0.2)).unwrap();
        let (_, counts) = compile_to_native(&c).unwrap();
        // 107 swapped bonds at three each, 35 final-layer couplings at two each
        assert_eq!(counts.sqrt_iswap, 391);
    }

    /// Replays the schedule on a line of labels and collects adjacent pairs.
    fn replay(placement: &[VarId], layers: usize) -> BTreeSet<(VarId, VarId)> {
        let mut at = placement.to_vec();
        let mut pairs = BTreeSet::new();
        for l in 0..layers {
            let mut p = l % 2;
            while p + 1 < at.len() {
                pairs.insert((at[p].min(at[p + 1]), at[p].max(at[p + 1])));
                if l + 1 < layers {
                    at.swap(p, p + 1);
                }
                p += 2;
            }
        }
        pairs
    }

    #[test]
    fn circuit_equals_truncated_qaoa() {
        // The circuit leaves qubit q holding variable final_placement[q];
        // permute the reference amplitudes accordingly.
        let p = gen_sk(6, 4).unwrap();
        let a = TruncatedAnsatz::new(&p, 2, &mut rng_for(2, 0)).unwrap();
        let angles = QaoaAngles::p1(0.7, 0.4);
        let c = a.circuit(&p, &angles).unwrap();
        let mut amps = vec![C64::default(); 64];
        amps[0] = C64::new(1.0, 0.0);
        apply_circuit(&mut amps, &c);
        let t = a.truncated_problem(&p).unwrap();
        let reference = QaoaSimulator::new(&t).unwrap().state(&angles);
        for (idx, amp) in amps.iter().enumerate() {
            let mut r = 0usize;
            for (q, &id) in a.final_placement.iter().enumerate() {
                r |= ((idx >> q) & 1) << id;
            }
            assert!((amp - reference.amps[r]).norm() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn edges_match_schedule_replay(seed in 0u64..200, n in 2usize..40) {
            let p = gen_sk(n, seed).unwrap();
            let a = TruncatedAnsatz::new(&p, 2, &mut rng_for(seed, 1)).unwrap();
            let got: BTreeSet<_> = a.edges.iter().copied().collect();
            prop_assert_eq!(got.len(), a.edges.len());
            prop_assert_eq!(got, replay(&a.placement, 4));
        }
    }
}
