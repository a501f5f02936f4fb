//! Bit-string sources: uniform noise, exact QAOA statevectors, and the
//! truncated brick-wall ansatz shared with the MPS simulator.

mod ansatz;
mod grid;
mod packed;
mod statevector;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem};

pub use ansatz::{truncated_ansatz_edges, TruncatedAnsatz};
pub use grid::{grid_angles, grid_search, GridResult, GridSpec};
pub use packed::PackedSamples;
pub use statevector::{qaoa_state, sample_state, QaoaSimulator, StateVector, STATEVECTOR_CAP};

/// Seeded generator for stream `stream` of `seed`. Distinct streams are
/// independent, so parallel tasks can each own one.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-layer QAOA angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaAngles {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl QaoaAngles {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() || gamma.len() != beta.len() {
            return Err(Error::InvalidParameter(format!(
                "need p >= 1 equal-length angle lists, got {} gammas and {} betas",
                gamma.len(),
                beta.len()
            )));
        }
        Ok(QaoaAngles { gamma, beta })
    }

    /// One layer.
    pub fn p1(gamma: f64, beta: f64) -> Self {
        QaoaAngles {
            gamma: vec![gamma],
            beta: vec![beta],
        }
    }

    pub fn depth(&self) -> usize {
        self.gamma.len()
    }

    /// Angles reduced to `gamma in [0, 2 pi)` and `beta in [0, pi)`.
    pub fn canonical(&self) -> Self {
        QaoaAngles {
            gamma: self.gamma.iter().map(|g| g.rem_euclid(2.0 * PI)).collect(),
            beta: self.beta.iter().map(|b| b.rem_euclid(PI)).collect(),
        }
    }
}

/// Where a batch of samples came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Uniform,
    Statevector,
    Mps,
    Fixed,
}

/// A batch of `M >= 1` bit strings over the problem's original variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<BitString>,
    pub source: SourceTag,
    pub angles: Option<QaoaAngles>,
    /// Average cost of the samples under the problem they were drawn for.
    pub mean_cost: f64,
}

impl SampleSet {
    pub fn new(
        problem: &IsingProblem,
        samples: Vec<BitString>,
        source: SourceTag,
        angles: Option<QaoaAngles>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("a sample set needs at least one bit string".into()));
        }
        if let Some(b) = samples.iter().find(|b| b.len() != problem.n_total()) {
            return Err(Error::Dimension {
                expected: problem.n_total(),
                found: b.len(),
            });
        }
        let dense = problem.dense();
        let mean_cost = PackedSamples::new(&samples, &dense.ids).mean_cost(&dense);
        Ok(SampleSet {
            samples,
            source,
            angles,
            mean_cost,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Lowest cost among the samples and its index.
    pub fn best(&self, problem: &IsingProblem) -> Result<(f64, usize)> {
        let mut best = (f64::INFINITY, 0);
        for (i, b) in self.samples.iter().enumerate() {
            let c = problem.evaluate_cost(b)?;
            if c < best.0 {
                best = (c, i);
            }
        }
        Ok(best)
    }
}

/// `m` uniform strings over `n` bits.
pub fn uniform_bitstrings(n: usize, m: usize, rng: &mut impl Rng) -> Vec<BitString> {
    (0..m)
        .map(|_| {
            let bits = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
            BitString::from_bits(bits).expect("bits are 0 or 1")
        })
        .collect()
}

/// Uniform strings over the active variables, with frozen variables set to
/// their fixed spins.
pub fn sample_uniform(problem: &IsingProblem, m: usize, rng: &mut impl Rng) -> Result<SampleSet> {
    let mut samples = uniform_bitstrings(problem.n_total(), m, rng);
    for b in &mut samples {
        problem.fill_frozen(b);
    }
    SampleSet::new(problem, samples, SourceTag::Uniform, None)
}
