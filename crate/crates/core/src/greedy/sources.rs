use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem};
use crate::mps::MpsSampler;
use crate::samplers::{grid_search, rng_for, sample_uniform, GridSpec, QaoaSimulator, SampleSet, SourceTag};

/// Something that draws `m` strings for the current reduced problem. Frozen
/// bits of every returned string must match the problem's fixed spins.
pub trait SampleSource: Sync {
    fn draw(&self, problem: &IsingProblem, m: usize, seed: u64) -> Result<SampleSet>;
}

/// Built-in sample sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    #[default]
    Uniform,
    /// Exact depth-one QAOA over the full reduced problem, angles from a grid.
    Statevector,
    /// Truncated-ansatz QAOA on a matrix product state, angles from a grid.
    Mps,
}

impl SourceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Uniform => "uniform",
            SourceKind::Statevector => "statevector",
            SourceKind::Mps => "mps",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformSource;

impl SampleSource for UniformSource {
    fn draw(&self, problem: &IsingProblem, m: usize, seed: u64) -> Result<SampleSet> {
        sample_uniform(problem, m, &mut rng_for(seed, 0))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StatevectorSource {
    pub grid: GridSpec,
}

impl SampleSource for StatevectorSource {
    fn draw(&self, problem: &IsingProblem, m: usize, seed: u64) -> Result<SampleSet> {
        let sim = QaoaSimulator::new(problem)?;
        Ok(grid_search(self.grid, m, seed, |a, m, rng| sim.sample(a, m, rng))?.samples)
    }
}

/// A fresh random line placement per draw (from the last stream of `seed`),
/// shared by every grid point of that draw.
#[derive(Clone, Copy, Debug)]
pub struct MpsSource {
    pub grid: GridSpec,
    pub chi_max: usize,
}

impl SampleSource for MpsSource {
    fn draw(&self, problem: &IsingProblem, m: usize, seed: u64) -> Result<SampleSet> {
        let sampler = MpsSampler::random(problem, self.chi_max, &mut rng_for(seed, u64::MAX))?;
        Ok(grid_search(self.grid, m, seed, |a, m, rng| sampler.sample(a, m, rng))?.samples)
    }
}

/// Hands out the same strings every time, with frozen bits overwritten.
#[derive(Clone, Debug)]
pub struct FixedSource(pub Vec<BitString>);

impl SampleSource for FixedSource {
    fn draw(&self, problem: &IsingProblem, m: usize, _seed: u64) -> Result<SampleSet> {
        if self.0.is_empty() {
            return Err(Error::InvalidParameter("fixed source has no strings".into()));
        }
        let samples = self
            .0
            .iter()
            .cycle()
            .take(m)
            .map(|b| {
                let mut b = b.clone();
                problem.fill_frozen(&mut b);
                b
            })
            .collect();
        SampleSet::new(problem, samples, SourceTag::Fixed, None)
    }
}

pub(super) fn build(kind: SourceKind, grid: GridSpec, chi_max: usize) -> Box<dyn SampleSource> {
    match kind {
        SourceKind::Uniform => Box::new(UniformSource),
        SourceKind::Statevector => Box::new(StatevectorSource { grid }),
        SourceKind::Mps => Box::new(MpsSource { grid, chi_max }),
    }
}
