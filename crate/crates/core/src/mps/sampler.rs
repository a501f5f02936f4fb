use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem};
use crate::samplers::{rng_for, QaoaAngles, SampleSet, SourceTag, TruncatedAnsatz};

use super::{MpsState, Truncation};

pub const DEFAULT_CHI_MAX: usize = 64;

/// Samples the truncated one-layer ansatz of a problem on an MPS. The line
/// placement is fixed at construction so that all angles share one circuit
/// layout.
#[derive(Clone, Debug)]
pub struct MpsSampler {
    problem: IsingProblem,
    ansatz: TruncatedAnsatz,
    chi_max: usize,
}

impl MpsSampler {
    pub fn new(problem: &IsingProblem, ansatz: TruncatedAnsatz, chi_max: usize) -> Result<Self> {
        if problem.n_active() == 0 {
            return Err(Error::NoActiveVariables);
        }
        let mut placed = ansatz.placement.clone();
        placed.sort_unstable();
        if placed != problem.active() {
            return Err(Error::InvalidParameter(
                "ansatz placement must cover exactly the active variables".into(),
            ));
        }
        Ok(MpsSampler {
            problem: problem.clone(),
            ansatz,
            chi_max,
        })
    }

    /// Random placement with two swap cycles.
    pub fn random(problem: &IsingProblem, chi_max: usize, rng: &mut impl Rng) -> Result<Self> {
        let ansatz = TruncatedAnsatz::new(problem, 2, rng)?;
        Self::new(problem, ansatz, chi_max)
    }

    pub fn ansatz(&self) -> &TruncatedAnsatz {
        &self.ansatz
    }

    /// The ansatz state at `angles`, computed without truncation.
    pub fn state(&self, angles: &QaoaAngles) -> Result<MpsState> {
        let circuit = self.ansatz.circuit(&self.problem, angles)?;
        let mut s = MpsState::zeros(self.ansatz.n_qubits());
        s.apply_circuit(&circuit, self.chi_max, Truncation::Exact)?;
        Ok(s)
    }

    /// Expands a string over line positions to the problem's variables.
    pub fn to_problem_bits(&self, positions: &BitString) -> BitString {
        let mut b = BitString::zeros(self.problem.n_total());
        self.problem.fill_frozen(&mut b);
        for (q, &id) in self.ansatz.final_placement.iter().enumerate() {
            b.set(id, positions.bit(q));
        }
        b
    }

    pub fn sample(&self, angles: &QaoaAngles, m: usize, rng: &mut impl Rng) -> Result<SampleSet> {
        let state = self.state(angles)?;
        let samples = state
            .sample(m, rng)?
            .iter()
            .map(|b| self.to_problem_bits(b))
            .collect();
        SampleSet::new(&self.problem, samples, SourceTag::Mps, Some(angles.clone()))
    }
}

/// One-shot truncated QAOA: placement from stream 0 of `seed`, samples from
/// stream 1.
pub fn run_truncated_qaoa_mps(problem: &IsingProblem, angles: &QaoaAngles, seed: u64, m: usize) -> Result<SampleSet> {
    let sampler = MpsSampler::random(problem, DEFAULT_CHI_MAX, &mut rng_for(seed, 0))?;
    sampler.sample(angles, m, &mut rng_for(seed, 1))
}
