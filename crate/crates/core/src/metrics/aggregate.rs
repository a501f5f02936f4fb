use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{mean, std_dev};

use super::RatioMode;

/// One solver run on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: String,
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub cost: f64,
    /// Raw approximation ratio of `cost`, if a reference was available.
    pub ratio: Option<f64>,
    pub mode: Option<RatioMode>,
    pub wall_seconds: f64,
}

/// Summary of the ratios sharing a `(method, n, mode)` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub n: usize,
    pub mean_r: f64,
    /// Sample standard deviation (`n - 1` denominator), 0 for a single run.
    pub std_r: f64,
    pub stderr_r: f64,
    pub count: usize,
    pub mode: RatioMode,
    /// Mean of the ratios clamped to `[0, 1]`.
    pub mean_r_clipped: f64,
    pub mean_cost: f64,
    pub mean_wall_seconds: f64,
}

/// Groups runs with a ratio by `(method, n, mode)` in sorted key order. Values
/// are sorted before summation, so the result does not depend on input order.
pub fn aggregate(runs: &[RunResult]) -> Vec<AggregateRow> {
    type Acc = (Vec<f64>, Vec<f64>, Vec<f64>);
    let mut groups: BTreeMap<(String, usize, RatioMode), Acc> = BTreeMap::new();
    for r in runs {
        if let (Some(x), Some(mode)) = (r.ratio, r.mode) {
            let g = groups.entry((r.method.clone(), r.n, mode)).or_default();
            g.0.push(x);
            g.1.push(r.cost);
            g.2.push(r.wall_seconds);
        }
    }
    groups
        .into_iter()
        .map(|((method, n, mode), (mut rs, mut cs, mut ws))| {
            for v in [&mut rs, &mut cs, &mut ws] {
                v.sort_by(f64::total_cmp);
            }
            let count = rs.len();
            let std_r = if count > 1 { std_dev(&rs) } else { 0.0 };
            let clipped: Vec<f64> = rs.iter().map(|x| x.clamp(0.0, 1.0)).collect();
            AggregateRow {
                method,
                n,
                mean_r: mean(&rs),
                std_r,
                stderr_r: std_r / (count as f64).sqrt(),
                count,
                mode,
                mean_r_clipped: mean(&clipped),
                mean_cost: mean(&cs),
                mean_wall_seconds: mean(&ws),
            }
        })
        .collect()
}

/// CSV with header `method,n,mean_r,std_r,stderr_r,count,mode,mean_r_clipped`.
/// Reals are printed with six decimals.
pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "n", "mean_r", "std_r", "stderr_r", "count", "mode", "mean_r_clipped"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.n.to_string(),
            format!("{:.6}", r.mean_r),
            format!("{:.6}", r.std_r),
            format!("{:.6}", r.stderr_r),
            r.count.to_string(),
            r.mode.as_str().to_string(),
            format!("{:.6}", r.mean_r_clipped),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    std::io::Error::other(e).into()
}
