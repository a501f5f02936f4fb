use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use qegreedy::baselines::{best_random_expected_cost, best_random_validity, gumbel_params, sk_cmin_proxy};
use qegreedy::greedy::{read_jsonl, StepKind};
use qegreedy::metrics::{aggregate, write_aggregate_csv, AggregateRow};
use qegreedy::stats::{mean, std_dev};

use crate::runner::{load_results, CellResult, MANIFEST};
use crate::CliError;

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `aggregate.csv`, `results.json` and the per-figure series into
/// `dir`. Fails when `dir` has no stored runs or no manifest.
pub fn write_reports(dir: &Path) -> Result<Vec<AggregateRow>, CliError> {
    let results = load_results(dir)?;
    if results.is_empty() {
        return Err(CliError::Runtime(format!("no runs found in {}", dir.display())));
    }
    if !dir.join(MANIFEST).exists() {
        return Err(CliError::Runtime(format!("missing manifest in {}", dir.display())));
    }
    let runs: Vec<_> = results.iter().map(|r| r.run.clone()).collect();
    let rows = aggregate(&runs);
    write_aggregate_csv(&rows, File::create(dir.join("aggregate.csv"))?)?;
    fs::write(
        dir.join("results.json"),
        serde_json::to_string_pretty(&results).expect("results serialize"),
    )?;
    write_csv(
        &dir.join("fig3_size_series.csv"),
        &["method", "n", "mean_r", "std_r", "stderr_r", "count", "mode", "mean_r_clipped"],
        rows.iter().map(|r| {
            vec![
                r.method.clone(),
                r.n.to_string(),
                f6(r.mean_r),
                f6(r.std_r),
                f6(r.stderr_r),
                r.count.to_string(),
                r.mode.as_str().to_string(),
                f6(r.mean_r_clipped),
            ]
        }),
    )?;
    write_csv(
        &dir.join("s12_quality_runtime.csv"),
        &["method", "n", "mean_r", "mean_wall_seconds", "count"],
        rows.iter().map(|r| {
            vec![
                r.method.clone(),
                r.n.to_string(),
                f6(r.mean_r),
                format!("{:.6e}", r.mean_wall_seconds),
                r.count.to_string(),
            ]
        }),
    )?;
    write_extreme_value(dir, &results)?;
    write_step_series(dir)?;
    Ok(rows)
}

fn write_extreme_value(dir: &Path, results: &[CellResult]) -> Result<(), CliError> {
    let sizes: BTreeSet<usize> = results.iter().filter(|r| r.run.family == "sk").map(|r| r.run.n).collect();
    let mut rows = Vec::new();
    for n in sizes {
        for e in 1..=12 {
            let m = 10f64.powi(e);
            let c = best_random_expected_cost(n, m);
            rows.push(vec![
                n.to_string(),
                format!("1e{e}"),
                f6(c),
                f6(gumbel_params(n, m).mean_min()),
                f6(0.5 * (1.0 + c / sk_cmin_proxy(n))),
                best_random_validity(n, m).to_string(),
            ]);
        }
    }
    write_csv(
        &dir.join("s3_extreme_value.csv"),
        &["n", "m", "expected_best_cost", "gumbel_mean_min", "ratio_proxy", "valid"],
        rows,
    )
}

/// Mean ratio of the sampled strings at each step, over all trajectories of
/// a `(method, n)` pair.
fn write_step_series(dir: &Path) -> Result<(), CliError> {
    type Acc = (Vec<f64>, Vec<f64>);
    let mut series: BTreeMap<(String, usize, usize), Acc> = BTreeMap::new();
    let root = dir.join("trajectories");
    if root.is_dir() {
        let mut files = Vec::new();
        for method in fs::read_dir(&root)? {
            let method = method?.path();
            if method.is_dir() {
                for f in fs::read_dir(&method)? {
                    let f = f?.path();
                    if f.extension().is_some_and(|e| e == "jsonl") {
                        files.push((method.file_name().expect("dir name").to_string_lossy().into_owned(), f));
                    }
                }
            }
        }
        files.sort();
        for (method, f) in files {
            let t = read_jsonl(BufReader::new(File::open(&f)?))?;
            for r in t.records.iter().filter(|r| r.kind == StepKind::Greedy) {
                if let (Some(x), Some(b)) = (r.ratio, r.best_ratio) {
                    let e = series.entry((method.clone(), t.n_total, r.step)).or_default();
                    e.0.push(x);
                    e.1.push(b);
                }
            }
        }
    }
    let rows = series.into_iter().map(|((method, n, step), (mut xs, mut bs))| {
        xs.sort_by(f64::total_cmp);
        bs.sort_by(f64::total_cmp);
        let sd = if xs.len() > 1 { std_dev(&xs) } else { 0.0 };
        vec![
            method,
            n.to_string(),
            step.to_string(),
            f6(mean(&xs)),
            f6(sd),
            f6(sd / (xs.len() as f64).sqrt()),
            f6(mean(&bs)),
            xs.len().to_string(),
        ]
    });
    write_csv(
        &dir.join("fig2_step_series.csv"),
        &["method", "n", "step", "mean_r", "std_r", "stderr_r", "mean_best_r", "count"],
        rows,
    )
}
