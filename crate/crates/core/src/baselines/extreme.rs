use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::stats::inverse_normal;

use super::EULER_MASCHERONI;

/// Location and scale of the Gumbel law for the best of `M` uniform SK costs,
/// stated for the negated cost (so `mu > 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GumbelParams {
    pub mu: f64,
    pub sigma: f64,
}

impl GumbelParams {
    /// Mean of the best (lowest) cost, `-(mu + gamma_EM sigma)`.
    pub fn mean_min(&self) -> f64 {
        -(self.mu + EULER_MASCHERONI * self.sigma)
    }
}

/// `mu = s Phi^-1(1 - 1/M)` and `sigma = s Phi^-1(1 - 1/(e M)) - mu` with
/// `s = sqrt(n (n - 1) / 2)`, the standard deviation of a uniform SK cost.
pub fn gumbel_params(n: usize, m: f64) -> GumbelParams {
    let s = sk_cost_sd(n);
    let mu = s * inverse_normal(1.0 - 1.0 / m);
    let sigma = s * inverse_normal(1.0 - 1.0 / (E * m)) - mu;
    GumbelParams { mu, sigma }
}

fn sk_cost_sd(n: usize) -> f64 {
    let n = n as f64;
    (n * (n - 1.0) / 2.0).sqrt()
}

/// Closed-form mean of the best of `m` uniform strings on an `n`-spin SK
/// instance:
/// `-(1 + gamma/ln M) sqrt(n(n-1)/2 * ln(M^2 / (2 pi ln(M^2 / 2 pi))))`.
/// Meaningful for `1 << M <~ 2^n`; see [`best_random_validity`].
pub fn best_random_expected_cost(n: usize, m: f64) -> f64 {
    let l = (m * m / (2.0 * PI)).ln();
    let inner = (m * m / (2.0 * PI * l)).ln();
    -(1.0 + EULER_MASCHERONI / m.ln()) * sk_cost_sd(n) * inner.sqrt()
}

/// Whether `(n, m)` lies in the window where the Gumbel approximation is
/// expected to hold (`10 <= M <= 2^n`).
pub fn best_random_validity(n: usize, m: f64) -> bool {
    m >= 10.0 && m.log2() <= n as f64
}
