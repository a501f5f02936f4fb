use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem, Spin};
use crate::samplers::rng_for;

const TOL: f64 = 1e-8;
const MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRound {
    pub cost: f64,
    pub bits: BitString,
    /// Smallest eigenvalue of the coupling matrix.
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Unit eigenvector for the smallest eigenvalue of the symmetric row-major
/// `n x n` matrix `w`, by power iteration on `c I - w` with `c` a Gershgorin
/// bound. Returns `(eigenvalue, vector, iterations)`.
pub fn min_eigenvector(w: &[f64], n: usize) -> Result<(f64, Vec<f64>, usize)> {
    if w.len() != n * n || n == 0 {
        return Err(Error::Dimension {
            expected: n * n,
            found: w.len(),
        });
    }
    let c = (0..n)
        .map(|a| w[a * n..(a + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let mut rng = rng_for(0, 0);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    for it in 1..=MAX_ITER {
        for a in 0..n {
            let row = &w[a * n..(a + 1) * n];
            y[a] = c * x[a] - row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>();
        }
        normalize(&mut y);
        let delta = x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        std::mem::swap(&mut x, &mut y);
        if delta < TOL {
            let lambda = rayleigh(w, n, &x);
            return Ok((lambda, x, it));
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

fn rayleigh(w: &[f64], n: usize, x: &[f64]) -> f64 {
    (0..n)
        .map(|a| x[a] * w[a * n..(a + 1) * n].iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

/// Rounds the minimum-eigenvalue eigenvector of the couplings to spins (zero
/// entries to `+1`), and keeps the better of that assignment and its
/// global flip under the full objective.
pub fn sdp_spectral_round(problem: &IsingProblem) -> Result<SpectralRound> {
    let d = problem.dense();
    let n = d.n();
    if n < 2 {
        return Err(Error::InvalidParameter("spectral rounding needs at least two active variables".into()));
    }
    let (eigenvalue, x, iterations) = min_eigenvector(&d.w, n)?;
    let mut bits = BitString::zeros(problem.n_total());
    problem.fill_frozen(&mut bits);
    for (a, &id) in d.ids.iter().enumerate() {
        bits.set_spin(id, if x[a] < 0.0 { Spin::Minus } else { Spin::Plus });
    }
    let mut flipped = bits.clone();
    for &id in &d.ids {
        flipped.set_spin(id, bits.spin(id).flipped());
    }
    let (c0, c1) = (problem.evaluate_cost(&bits)?, problem.evaluate_cost(&flipped)?);
    let (cost, bits) = if c1 < c0 { (c1, flipped) } else { (c0, bits) };
    Ok(SpectralRound {
        cost,
        bits,
        eigenvalue,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{brute_force, gen_sk, BRUTE_FORCE_CAP};
    use nalgebra::DMatrix;

    #[test]
    fn two_spins_antiparallel() {
        let mut p = IsingProblem::new(2);
        p.add_coupling(0, 1, 1.0).unwrap();
        let r = sdp_spectral_round(&p).unwrap();
        assert_eq!(r.cost, -1.0);
        assert_ne!(r.bits.bit(0), r.bits.bit(1));
        assert!((r.eigenvalue + 1.0).abs() < 1e-8);
    }

    #[test]
    fn eigenvalue_matches_dense_solver() {
        for seed in 0..10 {
            let d = gen_sk(30, seed).unwrap().dense();
            let (lambda, x, _) = min_eigenvector(&d.w, 30).unwrap();
            let m = DMatrix::from_row_slice(30, 30, &d.w);
            let eig = m.clone().symmetric_eigen();
            let want = eig.eigenvalues.min();
            assert!((lambda - want).abs() < 1e-6, "{lambda} vs {want}");
            let mx = &m * nalgebra::DVector::from_column_slice(&x);
            let resid = mx - nalgebra::DVector::from_column_slice(&x) * lambda;
            assert!(resid.norm() < 1e-4);
        }
    }

    #[test]
    fn never_below_brute_force_and_flip_invariant() {
        for seed in 0..20 {
            let p = gen_sk(14, seed).unwrap();
            let r = sdp_spectral_round(&p).unwrap();
            let bf = brute_force(&p, BRUTE_FORCE_CAP).unwrap();
            assert!(r.cost >= bf.c_min - 1e-9);
            assert_eq!(p.evaluate_cost(&r.bits.complement()).unwrap(), r.cost);
        }
    }
}
