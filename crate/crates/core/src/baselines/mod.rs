//! Closed-form reference values and classical solvers to compare against.

mod annealing;
mod extreme;
mod greedy;
mod spectral;

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use annealing::{simulated_annealing, AnnealResult, AnnealSchedule};
pub use extreme::{best_random_expected_cost, best_random_validity, gumbel_params, GumbelParams};
pub use greedy::{classical_greedy_direct, greedy_3regular_theory, greedy_ring_theory, GreedyRun};
pub use spectral::{min_eigenvector, sdp_spectral_round, SpectralRound};

/// SK ground-state energy density, `C_min / N^{3/2} -> -PARISI`.
pub const PARISI: f64 = 0.763166726566547;
/// Finite-size correction amplitude in [`sk_cmin_proxy`].
pub const FINITE_SIZE_A: f64 = 0.70;
/// Finite-size correction exponent in [`sk_cmin_proxy`].
pub const FINITE_SIZE_OMEGA: f64 = 2.0 / 3.0;
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// A named constant with a short description of where it enters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub name: &'static str,
    pub value: f64,
    pub role: &'static str,
}

/// Every asymptotic constant used by the baselines.
pub const CONSTANTS: [Constant; 4] = [
    Constant {
        name: "parisi",
        value: PARISI,
        role: "SK ground-state energy per N^{3/2}",
    },
    Constant {
        name: "finite_size_a",
        value: FINITE_SIZE_A,
        role: "finite-size correction amplitude for the SK minimum",
    },
    Constant {
        name: "finite_size_omega",
        value: FINITE_SIZE_OMEGA,
        role: "finite-size correction exponent for the SK minimum",
    },
    Constant {
        name: "euler_mascheroni",
        value: EULER_MASCHERONI,
        role: "mean offset of the Gumbel law for best-of-M sampling",
    },
];

/// Methods with a known infinite-size approximation ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticMethod {
    Random,
    Qaoa1,
    GreedySk,
    SdpSk,
    GreedyRing,
}

impl AnalyticMethod {
    pub const ALL: [AnalyticMethod; 5] = [
        AnalyticMethod::Random,
        AnalyticMethod::Qaoa1,
        AnalyticMethod::GreedySk,
        AnalyticMethod::SdpSk,
        AnalyticMethod::GreedyRing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AnalyticMethod::Random => "random",
            AnalyticMethod::Qaoa1 => "qaoa1",
            AnalyticMethod::GreedySk => "greedy_sk",
            AnalyticMethod::SdpSk => "sdp_sk",
            AnalyticMethod::GreedyRing => "greedy_ring",
        }
    }
}

impl fmt::Display for AnalyticMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnalyticMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnalyticMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Infinite-size approximation ratio of `method`.
pub fn analytic_ratio(method: AnalyticMethod) -> f64 {
    match method {
        AnalyticMethod::Random => 0.5,
        AnalyticMethod::Qaoa1 => 0.5 + 1.0 / (4.0 * PARISI * E.sqrt()),
        AnalyticMethod::GreedySk => 0.5 + (2.0 / PI).sqrt() / (3.0 * PARISI),
        AnalyticMethod::SdpSk => 0.5 + 1.0 / (PI * PARISI),
        AnalyticMethod::GreedyRing => 5.0 / 6.0,
    }
}

/// Finite-size estimate of the SK minimum, `n^{3/2} (-P + a n^{-omega})`.
pub fn sk_cmin_proxy(n: usize) -> f64 {
    let n = n as f64;
    n.powf(1.5) * (-PARISI + FINITE_SIZE_A * n.powf(-FINITE_SIZE_OMEGA))
}

/// `-sqrt(2 / pi) * sum_{l=1}^{n-1} sqrt(l)`, the mean randomized-greedy cost
/// on SK instances.
pub fn greedy_sk_expected_cost(n: usize) -> f64 {
    -(2.0 / PI).sqrt() * (1..n).map(|l| (l as f64).sqrt()).sum::<f64>()
}
