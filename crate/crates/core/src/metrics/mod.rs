//! Approximation ratios and ensemble tables.

mod aggregate;

use serde::{Deserialize, Serialize};

use crate::baselines::sk_cmin_proxy;
use crate::error::{Error, Result};

pub use aggregate::{aggregate, write_aggregate_csv, AggregateRow, RunResult};

/// `(c_max - c_star) / (c_max - c_min)`: 1 at the optimum, 0 at the worst
/// assignment. Values outside `[0, 1]` are returned as computed.
pub fn ratio_exact(c_star: f64, c_min: f64, c_max: f64) -> Result<f64> {
    if !(c_min < c_max) {
        return Err(Error::DegenerateSpectrum(c_min));
    }
    Ok((c_max - c_star) / (c_max - c_min))
}

/// `(1 + c_star / C_min(n)) / 2` with the finite-size SK minimum estimate,
/// assuming `C_max = -C_min`.
pub fn ratio_proxy_sk(c_star: f64, n: usize) -> f64 {
    0.5 * (1.0 + c_star / sk_cmin_proxy(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMode {
    Exact,
    Proxy,
}

impl RatioMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RatioMode::Exact => "exact",
            RatioMode::Proxy => "proxy",
        }
    }
}

/// What a cost is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RatioReference {
    Exact { c_min: f64, c_max: f64 },
    SkProxy { n: usize },
}

impl RatioReference {
    pub fn exact(c_min: f64, c_max: f64) -> Result<Self> {
        if !(c_min < c_max) {
            return Err(Error::DegenerateSpectrum(c_min));
        }
        Ok(RatioReference::Exact { c_min, c_max })
    }

    pub fn mode(&self) -> RatioMode {
        match self {
            RatioReference::Exact { .. } => RatioMode::Exact,
            RatioReference::SkProxy { .. } => RatioMode::Proxy,
        }
    }

    pub fn estimate(&self, c_star: f64) -> RatioEstimate {
        let (value, n) = match *self {
            RatioReference::Exact { c_min, c_max } => ((c_max - c_star) / (c_max - c_min), None),
            RatioReference::SkProxy { n } => (ratio_proxy_sk(c_star, n), Some(n)),
        };
        RatioEstimate {
            value,
            clipped: value.clamp(0.0, 1.0),
            out_of_range: !(0.0..=1.0).contains(&value),
            mode: self.mode(),
            n,
            c_star,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    /// Raw ratio, possibly outside `[0, 1]`.
    pub value: f64,
    pub clipped: f64,
    pub out_of_range: bool,
    pub mode: RatioMode,
    /// Problem size fed to the proxy formula.
    pub n: Option<usize>,
    pub c_star: f64,
}
