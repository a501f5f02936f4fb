use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::constraints::{LinearConstraint, Sense};
use super::problem::{IsingProblem, VarId};

const REGULAR_RETRIES: usize = 10_000;
const PORTFOLIO_EXACT_MAX: usize = 20;
const PORTFOLIO_MC_SAMPLES: usize = 1 << 16;

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

/// Sherrington-Kirkpatrick instance: complete graph, `w_ij = +-1`, `u = v = 0`.
pub fn gen_sk(n: usize, seed: u64) -> Result<IsingProblem> {
    require(n >= 2, format!("SK instances need n >= 2, got {n}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = IsingProblem::new(n);
    for i in 0..n {
        for j in i + 1..n {
            p.add_coupling(i, j, sign(&mut rng))?;
        }
    }
    Ok(p)
}

/// Cycle `0-1-...-(n-1)-0` with `+-1` weights.
pub fn gen_ring(n: usize, seed: u64) -> Result<IsingProblem> {
    require(n >= 3, format!("ring instances need n >= 3, got {n}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = IsingProblem::new(n);
    for i in 0..n {
        p.add_coupling(i, (i + 1) % n, sign(&mut rng))?;
    }
    Ok(p)
}

/// Random simple 3-regular graph with `+-1` weights, drawn from the
/// configuration model with rejection of self-loops and repeated edges.
pub fn gen_3regular(n: usize, seed: u64) -> Result<IsingProblem> {
    require(n >= 4 && n % 2 == 0, format!("3-regular graphs need even n >= 4, got {n}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<VarId> = (0..n).flat_map(|i| [i, i, i]).collect();
    for _ in 0..REGULAR_RETRIES {
        stubs.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        let simple = stubs.chunks_exact(2).all(|e| {
            let (a, b) = (e[0].min(e[1]), e[0].max(e[1]));
            a != b && edges.insert((a, b))
        });
        if simple {
            let mut p = IsingProblem::new(n);
            for (a, b) in edges {
                p.add_coupling(a, b, sign(&mut rng))?;
            }
            return Ok(p);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no simple 3-regular graph on {n} nodes after {REGULAR_RETRIES} attempts"
    )))
}

/// Synthetic portfolio-style instance.
///
/// `v_i` and `w_ij` are uniform on `[-1, 1]`, with each pair present with
/// probability `density`. The two constraints are `sum Z_i <= A` and
/// `sum mu_i Z_i >= B` with `mu_i` uniform on `(0, 1]`.
///
/// `tightness` in `[0, 1]` sets the bounds: each constraint alone accepts at
/// least a `1 - tightness / 2` fraction of uniform bit strings, so at least
/// `1 - tightness` of them satisfy both. Zero tightness gives `A = n` and
/// `B = -sum mu_i`, both vacuous. The fractions are exact for `n <= 20` and
/// Monte Carlo estimates above that.
pub fn gen_portfolio(
    n: usize,
    seed: u64,
    density: f64,
    tightness: f64,
) -> Result<(IsingProblem, Vec<LinearConstraint>)> {
    require(n >= 2, format!("portfolio instances need n >= 2, got {n}"))?;
    require((0.0..=1.0).contains(&density), format!("density {density} not in [0, 1]"))?;
    require((0.0..=1.0).contains(&tightness), format!("tightness {tightness} not in [0, 1]"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = IsingProblem::new(n);
    for i in 0..n {
        p.add_linear(i, rng.gen_range(-1.0..=1.0))?;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                p.add_coupling(i, j, rng.gen_range(-1.0..=1.0))?;
            }
        }
    }
    let mu: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();

    let q = 1.0 - tightness / 2.0;
    let a = size_bound(n, q);
    let b = return_bound(&mu, q, &mut rng);
    let size = LinearConstraint::count(n, a, Sense::Le)?;
    let coeffs: BTreeMap<VarId, f64> = mu.into_iter().enumerate().collect();
    let ret = LinearConstraint::new(coeffs, b, Sense::Ge)?;
    Ok((p, vec![size, ret]))
}

/// Smallest `A` with `P(sum Z <= A) >= q` for uniform strings.
fn size_bound(n: usize, q: f64) -> f64 {
    // sum Z = n - 2k where k ~ Binomial(n, 1/2) counts the ones.
    let mut pmf = vec![1.0_f64; 1];
    for _ in 0..n {
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &x) in pmf.iter().enumerate() {
            next[k] += 0.5 * x;
            next[k + 1] += 0.5 * x;
        }
        pmf = next;
    }
    // P(sum Z <= n - 2k) = P(ones >= k); scan from the largest sum down.
    let mut tail = 0.0;
    let mut cdf_at = vec![0.0; n + 1];
    for k in (0..=n).rev() {
        tail += pmf[k];
        cdf_at[k] = tail;
    }
    let mut best = n as f64;
    for k in 0..=n {
        if cdf_at[k] >= q - 1e-12 {
            best = (n - 2 * k) as f64;
        }
    }
    best
}

/// Largest `B` with `P(sum mu_i Z_i >= B) >= q` for uniform strings.
fn return_bound(mu: &[f64], q: f64, rng: &mut ChaCha8Rng) -> f64 {
    let n = mu.len();
    let mut sums: Vec<f64> = if n <= PORTFOLIO_EXACT_MAX {
        (0..(1u64 << n))
            .map(|index| {
                mu.iter()
                    .enumerate()
                    .map(|(i, &m)| if (index >> i) & 1 == 0 { m } else { -m })
                    .sum()
            })
            .collect()
    } else {
        (0..PORTFOLIO_MC_SAMPLES)
            .map(|_| mu.iter().map(|&m| if rng.gen::<bool>() { m } else { -m }).sum())
            .collect()
    };
    sums.sort_by(|a, b| b.total_cmp(a));
    let need = ((q * sums.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    sums[need.min(sums.len()) - 1]
}
