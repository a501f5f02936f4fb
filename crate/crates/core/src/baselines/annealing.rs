use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{BitString, IsingProblem};

/// Geometric temperature schedule over `sweeps` full passes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl AnnealSchedule {
    /// `2 max|w|` down to `0.1` over 1000 sweeps.
    pub fn default_for(problem: &IsingProblem) -> Self {
        let scale = problem.max_abs_coupling().max(
            problem
                .linear_terms()
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max),
        );
        AnnealSchedule {
            sweeps: 1000,
            t_start: 2.0 * scale.max(f64::MIN_POSITIVE),
            t_end: 0.1,
        }
    }

    fn temperature(&self, sweep: usize) -> f64 {
        if self.sweeps <= 1 || self.t_start == self.t_end {
            return self.t_start;
        }
        let f = sweep as f64 / (self.sweeps - 1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealResult {
    pub best_cost: f64,
    pub best_bits: BitString,
    /// Cost of the state at the end of the last sweep.
    pub final_cost: f64,
}

/// Single-spin-flip Metropolis annealing from a uniform random start,
/// returning the best state seen.
pub fn simulated_annealing(
    problem: &IsingProblem,
    schedule: AnnealSchedule,
    rng: &mut impl Rng,
) -> Result<AnnealResult> {
    if schedule.sweeps == 0 || !(schedule.t_start > 0.0) || !(schedule.t_end > 0.0) {
        return Err(Error::InvalidParameter(
            "annealing needs at least one sweep and positive temperatures".into(),
        ));
    }
    let d = problem.dense();
    let n = d.n();
    let mut z: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    // h[a] = v_a + sum_b w_ab z_b, so flipping a changes the cost by -2 z_a h_a
    let mut h: Vec<f64> = (0..n)
        .map(|a| d.v[a] + d.row(a).iter().zip(&z).map(|(w, x)| w * x).sum::<f64>())
        .collect();
    let mut cost = d.cost_spins(&z);
    let mut best = (cost, z.clone());
    for sweep in 0..schedule.sweeps {
        let t = schedule.temperature(sweep);
        for a in 0..n {
            let delta = -2.0 * z[a] * h[a];
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                z[a] = -z[a];
                cost += delta;
                let s = 2.0 * z[a];
                for (hb, &w) in h.iter_mut().zip(d.row(a)) {
                    *hb += s * w;
                }
                if cost < best.0 {
                    best = (cost, z.clone());
                }
            }
        }
    }
    let to_bits = |z: &[f64]| {
        let mut b = BitString::zeros(problem.n_total());
        problem.fill_frozen(&mut b);
        for (a, &id) in d.ids.iter().enumerate() {
            b.set(id, u8::from(z[a] < 0.0));
        }
        b
    };
    let best_bits = to_bits(&best.1);
    Ok(AnnealResult {
        best_cost: problem.evaluate_cost(&best_bits)?,
        best_bits,
        final_cost: problem.evaluate_cost(&to_bits(&z))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{brute_force, gen_sk, BRUTE_FORCE_CAP};
    use crate::samplers::rng_for;
    use crate::stats::{mean, std_err};

    #[test]
    fn infinite_temperature_is_random() {
        let p = gen_sk(16, 0).unwrap();
        let hot = AnnealSchedule {
            sweeps: 3,
            t_start: f64::INFINITY,
            t_end: f64::INFINITY,
        };
        let finals: Vec<f64> = (0..2000)
            .map(|s| simulated_annealing(&p, hot, &mut rng_for(s, 0)).unwrap().final_cost)
            .collect();
        assert!(mean(&finals).abs() < 4.0 * std_err(&finals));
    }

    #[test]
    fn finds_small_optima() {
        let mut hits = 0;
        for seed in 0..100u64 {
            let p = gen_sk(12, seed).unwrap();
            let bf = brute_force(&p, BRUTE_FORCE_CAP).unwrap();
            let r = simulated_annealing(&p, AnnealSchedule::default_for(&p), &mut rng_for(seed, 9)).unwrap();
            assert!(r.best_cost >= bf.c_min - 1e-9);
            hits += usize::from((r.best_cost - bf.c_min).abs() < 1e-9);
        }
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn rejects_bad_schedule() {
        let p = gen_sk(4, 0).unwrap();
        let s = AnnealSchedule {
            sweeps: 0,
            t_start: 1.0,
            t_end: 0.1,
        };
        assert!(simulated_annealing(&p, s, &mut rng_for(0, 0)).is_err());
    }
}
