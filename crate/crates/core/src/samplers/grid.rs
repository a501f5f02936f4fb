use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{rng_for, QaoaAngles, SampleSet};

/// A `n_gamma x n_beta` grid over `gamma in [0, 2 pi)` and `beta in [0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_gamma: usize,
    pub n_beta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_gamma: 16,
            n_beta: 16,
        }
    }
}

pub fn grid_angles(spec: GridSpec, i: usize, j: usize) -> QaoaAngles {
    QaoaAngles::p1(
        2.0 * PI * i as f64 / spec.n_gamma as f64,
        PI * j as f64 / spec.n_beta as f64,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub angles: QaoaAngles,
    /// `(gamma index, beta index)` of the winning point.
    pub index: (usize, usize),
    /// The batch drawn at the winning point.
    pub samples: SampleSet,
}

/// Draws `m` fresh samples at every grid point through `sample` and keeps the
/// point with the lowest sample mean; ties go to the lowest
/// `(gamma index, beta index)`. Point `k = i * n_beta + j` uses stream `k` of
/// `seed`, so the result does not depend on the thread count.
pub fn grid_search<F>(spec: GridSpec, m: usize, seed: u64, sample: F) -> Result<GridResult>
where
    F: Fn(&QaoaAngles, usize, &mut ChaCha8Rng) -> Result<SampleSet> + Sync,
{
    if spec.n_gamma == 0 || spec.n_beta == 0 || m == 0 {
        return Err(Error::InvalidParameter("grid sizes and M must be positive".into()));
    }
    let points = spec.n_gamma * spec.n_beta;
    let sets: Vec<SampleSet> = (0..points)
        .into_par_iter()
        .map(|k| {
            let angles = grid_angles(spec, k / spec.n_beta, k % spec.n_beta);
            let mut rng = rng_for(seed, k as u64);
            sample(&angles, m, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, s) in sets.iter().enumerate() {
        if s.mean_cost < sets[best].mean_cost {
            best = k;
        }
    }
    let (i, j) = (best / spec.n_beta, best % spec.n_beta);
    let samples = sets.into_iter().nth(best).expect("best index is in range");
    Ok(GridResult {
        angles: grid_angles(spec, i, j),
        index: (i, j),
        samples,
    })
}
