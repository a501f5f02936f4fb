use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{cost_table, BitString, DenseProblem, IsingProblem, VarId};

use super::{QaoaAngles, SampleSet, SourceTag};

/// Largest number of active variables simulated as a dense statevector.
pub const STATEVECTOR_CAP: usize = 24;

const NORM_TOL: f64 = 1e-8;

/// Dense state over the active variables. Bit `q` of an amplitude index is
/// qubit `q`, which carries variable `qubits[q]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amps: Vec<C64>,
    pub qubits: Vec<VarId>,
}

impl StateVector {
    /// `H^n |0...0>`.
    pub fn plus(qubits: Vec<VarId>) -> Self {
        let dim = 1usize << qubits.len();
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            amps: vec![a; dim],
            qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum_x |amp_x|^2 f_x`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.amps.iter().zip(values).map(|(a, v)| a.norm_sqr() * v).sum()
    }

    /// Expands amplitude index `index` to a full bit string, taking frozen
    /// variables from `problem`.
    pub fn bitstring(&self, problem: &IsingProblem, index: usize) -> BitString {
        let mut b = BitString::zeros(problem.n_total());
        problem.fill_frozen(&mut b);
        for (q, &id) in self.qubits.iter().enumerate() {
            b.set(id, ((index >> q) & 1) as u8);
        }
        b
    }
}

/// `exp(i beta X)` on every qubit.
fn apply_mixer(amps: &mut [C64], n: usize, beta: f64) {
    let (s, c) = beta.sin_cos();
    let is = C64::new(0.0, s);
    for q in 0..n {
        let stride = 1usize << q;
        for base in (0..amps.len()).step_by(2 * stride) {
            let (lo, hi) = amps[base..base + 2 * stride].split_at_mut(stride);
            for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x0, *x1);
                *x0 = a * c + b * is;
                *x1 = a * is + b * c;
            }
        }
    }
}

/// Exact QAOA on one (reduced) problem, with the cost of every basis state
/// computed once.
#[derive(Clone, Debug)]
pub struct QaoaSimulator {
    problem: IsingProblem,
    dense: DenseProblem,
    costs: Vec<f64>,
}

impl QaoaSimulator {
    pub fn new(problem: &IsingProblem) -> Result<Self> {
        let dense = problem.dense();
        if dense.n() > STATEVECTOR_CAP {
            return Err(Error::CapExceeded {
                what: "active variables for statevector simulation",
                size: dense.n(),
                cap: STATEVECTOR_CAP,
            });
        }
        let costs = cost_table(&dense, STATEVECTOR_CAP)?;
        Ok(QaoaSimulator {
            problem: problem.clone(),
            dense,
            costs,
        })
    }

    /// Cost of each basis state, indexed like the amplitudes.
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn problem(&self) -> &IsingProblem {
        &self.problem
    }

    /// `prod_d e^{i beta_d sum X} e^{i gamma_d C}` applied to `H^n |0>`.
    pub fn state(&self, angles: &QaoaAngles) -> StateVector {
        let n = self.dense.n();
        let mut sv = StateVector::plus(self.dense.ids.clone());
        for (&g, &b) in angles.gamma.iter().zip(&angles.beta) {
            for (a, &c) in sv.amps.iter_mut().zip(&self.costs) {
                *a *= C64::from_polar(1.0, g * c);
            }
            apply_mixer(&mut sv.amps, n, b);
        }
        sv
    }

    /// Exact `<C>` in a state produced by [`QaoaSimulator::state`].
    pub fn expectation(&self, state: &StateVector) -> f64 {
        state.expectation(&self.costs)
    }

    pub fn sample(&self, angles: &QaoaAngles, m: usize, rng: &mut impl Rng) -> Result<SampleSet> {
        let state = self.state(angles);
        let mut set = sample_state(&state, &self.problem, m, rng)?;
        set.angles = Some(angles.clone());
        Ok(set)
    }
}

pub fn qaoa_state(problem: &IsingProblem, angles: &QaoaAngles) -> Result<StateVector> {
    Ok(QaoaSimulator::new(problem)?.state(angles))
}

/// Draws `m` basis-state indices from `|amp|^2` by inverting the cumulative
/// distribution.
pub fn sample_indices(probs: &[f64], m: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(total));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    Ok((0..m)
        .map(|_| {
            let r = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= r).min(last_nonzero)
        })
        .collect())
}

/// `m` independent measurements of `state` in the computational basis.
pub fn sample_state(state: &StateVector, problem: &IsingProblem, m: usize, rng: &mut impl Rng) -> Result<SampleSet> {
    let idx = sample_indices(&state.probabilities(), m, rng)?;
    let samples = idx.into_iter().map(|i| state.bitstring(problem, i)).collect();
    SampleSet::new(problem, samples, SourceTag::Statevector, None)
}
