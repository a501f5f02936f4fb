//! Acceptance checks. Prints one line per criterion and exits nonzero if any
//! fails. `QEGREEDY_CRITERIA=1,5` runs a subset; the N = 72 MPS study only
//! runs with `QEGREEDY_FULL_MPS=1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use qegreedy::baselines::{
    analytic_ratio, best_random_expected_cost, classical_greedy_direct, greedy_3regular_theory,
    greedy_ring_theory, greedy_sk_expected_cost, AnalyticMethod,
};
use qegreedy::circuit::{
    apply_circuit, circuit_unitary, compile_to_native, decompose_rzz, decompose_rzz_swap, phase_distance,
    rzz_matrix, swap_matrix, to_dmatrix, GateMatrix,
};
use qegreedy::greedy::{self, run_with_sources, EngineConfig, FixedSource, RatioPolicy, SourceKind};
use qegreedy::ising::{
    brute_force, brute_force_constrained, check_constraints, gen_3regular, gen_portfolio, gen_ring, gen_sk,
    spectrum_histogram, IsingProblem, SpectrumHistogram, BRUTE_FORCE_CAP,
};
use qegreedy::metrics::ratio_exact;
use qegreedy::mps::{MpsSampler, DEFAULT_CHI_MAX};
use qegreedy::samplers::{rng_for, uniform_bitstrings, GridSpec, QaoaAngles, TruncatedAnsatz};
use qegreedy::stats::{ks_two_sample, linear_fit, mean, std_err};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(pass: bool, detail: String) -> Outcome {
    if pass {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

/// `(c_min, c_max)` by exhaustive search.
fn extrema(p: &IsingProblem) -> (f64, f64) {
    let bf = brute_force(p, BRUTE_FORCE_CAP).expect("within cap");
    (bf.c_min, bf.c_max)
}

fn engine(sel: SourceKind, dec: SourceKind, seed: u64, ext: (f64, f64)) -> EngineConfig {
    EngineConfig {
        selection: sel,
        decision: dec,
        seed,
        ratio: RatioPolicy::Given { c_min: ext.0, c_max: ext.1 },
        ..EngineConfig::default()
    }
}

fn combined_se(a: &[f64], b: &[f64]) -> f64 {
    (std_err(a).powi(2) + std_err(b).powi(2)).sqrt()
}

fn c1_greedy_asymptote() -> Outcome {
    let n = 500;
    let costs: Vec<f64> = (0..1000u64)
        .into_par_iter()
        .map(|s| {
            let p = gen_sk(n, s).unwrap();
            classical_greedy_direct(&p, &mut rng_for(s, 1)).cost
        })
        .collect();
    let q = mean(&costs) / greedy_sk_expected_cost(n);
    check((0.99..=1.01).contains(&q), format!("mean cost / prediction = {q:.4} (need [0.99, 1.01])"))
}

fn c2_greedy_ratio_curve() -> Outcome {
    let mut means = Vec::new();
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [8, 16, 24] {
        let rs: Vec<f64> = (0..1000u64)
            .into_par_iter()
            .map(|s| {
                let p = gen_sk(n, 10_000 + s).unwrap();
                let (lo, hi) = extrema(&p);
                let c = classical_greedy_direct(&p, &mut rng_for(s, 2)).cost;
                ratio_exact(c, lo, hi).unwrap()
            })
            .collect();
        let (m, se) = (mean(&rs), std_err(&rs));
        ok &= se < 0.01;
        detail.push(format!("r({n}) = {m:.4} +- {se:.4}"));
        means.push(m);
    }
    let target = analytic_ratio(AnalyticMethod::GreedySk);
    // finite-size greedy sits above the asymptote and closes in on it
    let gaps: Vec<f64> = means.iter().map(|m| m - target).collect();
    let one_side = gaps.iter().all(|&g| g > 0.0) || gaps.iter().all(|&g| g < 0.0);
    let closing = gaps.windows(2).all(|w| w[1].abs() < w[0].abs());
    let side = if gaps[0] > 0.0 { "from above" } else { "from below" };
    check(
        ok && one_side && closing,
        format!("{}; approaching {target:.4} {side}: {}", detail.join(", "), one_side && closing),
    )
}

fn c3_sparse_baselines() -> Outcome {
    let n = 300;
    let runs = 2000u64;
    let per_site = |gen: fn(usize, u64) -> qegreedy::Result<IsingProblem>| -> Vec<f64> {
        (0..runs)
            .into_par_iter()
            .map(|s| {
                let p = gen(n, s).unwrap();
                classical_greedy_direct(&p, &mut rng_for(s, 3)).cost / n as f64
            })
            .collect()
    };
    let ring = per_site(gen_ring);
    let reg = per_site(gen_3regular);
    let (tr, t3) = (greedy_ring_theory(n) / n as f64, greedy_3regular_theory(n) / n as f64);
    let zr = (mean(&ring) - tr) / std_err(&ring);
    let z3 = (mean(&reg) - t3) / std_err(&reg);
    check(
        zr.abs() <= 2.0 && z3.abs() <= 2.0,
        format!(
            "ring {:.4} vs {tr:.4} ({zr:+.2} se), 3-regular {:.4} vs {t3:.4} ({z3:+.2} se)",
            mean(&ring),
            mean(&reg)
        ),
    )
}

fn c4_analytic_constants() -> Outcome {
    let want = [
        (AnalyticMethod::Qaoa1, 0.698688),
        (AnalyticMethod::GreedySk, 0.848497),
        (AnalyticMethod::SdpSk, 0.917090),
    ];
    let errs: Vec<f64> = want.iter().map(|&(m, w)| (analytic_ratio(m) - w).abs()).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    check(worst < 1e-6, format!("max deviation {worst:.2e}"))
}

fn c5_engine_equivalence() -> Outcome {
    let n = 64;
    let engine_costs: Vec<f64> = (0..1000u64)
        .into_par_iter()
        .map(|s| {
            let p = gen_sk(n, 20_000 + s).unwrap();
            let cfg = EngineConfig {
                seed: s,
                ratio: RatioPolicy::Off,
                ..EngineConfig::default()
            };
            greedy::run(&p, &[], &cfg).unwrap().final_cost
        })
        .collect();
    let direct_costs: Vec<f64> = (0..1000u64)
        .into_par_iter()
        .map(|s| {
            let p = gen_sk(n, 30_000 + s).unwrap();
            classical_greedy_direct(&p, &mut rng_for(s, 5)).cost
        })
        .collect();
    let (d, pval) = ks_two_sample(&engine_costs, &direct_costs);
    check(
        pval > 0.01,
        format!(
            "KS D = {d:.4}, p = {pval:.4}; means {:.2} vs {:.2}",
            mean(&engine_costs),
            mean(&direct_costs)
        ),
    )
}

/// Final ratios of the engine with the given sources over SK instances.
fn ensemble(n: usize, count: u64, base: u64, arms: &[(SourceKind, SourceKind)]) -> Vec<Vec<f64>> {
    let per_instance: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|s| {
            let p = gen_sk(n, base + s).unwrap();
            let ext = extrema(&p);
            arms.iter()
                .map(|&(sel, dec)| {
                    let t = greedy::run(&p, &[], &engine(sel, dec, s, ext)).unwrap();
                    t.final_ratio.unwrap().value
                })
                .collect()
        })
        .collect();
    (0..arms.len()).map(|a| per_instance.iter().map(|r| r[a]).collect()).collect()
}

fn c6_quantum_enhancement() -> Outcome {
    use SourceKind::{Statevector as Q, Uniform as R};
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [12, 16] {
        let r = ensemble(n, 100, 40_000, &[(Q, Q), (R, R)]);
        let gap = mean(&r[0]) - mean(&r[1]);
        let se = combined_se(&r[0], &r[1]);
        ok &= gap >= 2.0 * se;
        detail.push(format!(
            "N={n}: quantum {:.4} vs uniform {:.4} (gap {:.2} se)",
            mean(&r[0]),
            mean(&r[1]),
            gap / se
        ));
    }
    check(ok, detail.join("; "))
}

fn c7_ablation() -> Outcome {
    use SourceKind::{Statevector as Q, Uniform as R};
    let r = ensemble(12, 100, 50_000, &[(Q, Q), (Q, R), (R, Q), (R, R)]);
    let m: Vec<f64> = r.iter().map(|x| mean(x)).collect();
    let d_sel = (m[1] - m[0]).abs() / combined_se(&r[1], &r[0]);
    let d_dec = (m[2] - m[3]).abs() / combined_se(&r[2], &r[3]);
    check(
        d_sel <= 1.0 && d_dec <= 1.0,
        format!(
            "QQ {:.4}, QR {:.4} ({d_sel:.2} se), RQ {:.4}, RR {:.4} ({d_dec:.2} se)",
            m[0], m[1], m[2], m[3]
        ),
    )
}

fn c8_optimality_preservation() -> Outcome {
    let mut exact = 0;
    for s in 0..100u64 {
        let n = 4 + (s % 9) as usize;
        let p = gen_sk(n, 60_000 + s).unwrap();
        let bf = brute_force(&p, BRUTE_FORCE_CAP).unwrap();
        let cfg = EngineConfig {
            seed: s,
            ratio: RatioPolicy::Given { c_min: bf.c_min, c_max: bf.c_max },
            ..EngineConfig::default()
        };
        let src = FixedSource(vec![bf.argmin.clone()]);
        let t = run_with_sources(&p, &[], &cfg, &src, None).unwrap();
        if t.final_ratio.unwrap().value == 1.0 {
            exact += 1;
        }
    }
    check(exact == 100, format!("{exact}/100 runs reach r = 1 exactly"))
}

fn c9_decompositions() -> Outcome {
    let mut rng = rng_for(9, 0);
    let target = |m| to_dmatrix(&GateMatrix::Two(m));
    let mut rzz: f64 = 0.0;
    for _ in 0..1000 {
        let phi = rng.gen_range(-PI..PI);
        let u = circuit_unitary(&decompose_rzz(phi).unwrap()).unwrap();
        rzz = rzz.max(phase_distance(&u, &target(rzz_matrix(phi))));
    }
    let mut sw: f64 = 0.0;
    for _ in 0..500 {
        let phi = rng.gen_range(0.0..=FRAC_PI_2);
        let u = circuit_unitary(&decompose_rzz_swap(phi).unwrap()).unwrap();
        sw = sw.max(phase_distance(&u, &target(swap_matrix() * rzz_matrix(phi))));
    }
    check(
        rzz < 1e-9 && sw < 1e-9,
        format!("max deviation Rzz {rzz:.2e}, SWAP.Rzz {sw:.2e}"),
    )
}

fn c10_gate_counts() -> Outcome {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut at72 = 0;
    for n in (8..=72).step_by(4) {
        let p = gen_sk(n, 70_000 + n as u64).unwrap();
        let a = TruncatedAnsatz::new(&p, 2, &mut rng_for(n as u64, 0)).unwrap();
        let circuit = a.circuit(&p, &QaoaAngles::p1(0.7, 0.3)).unwrap();
        let (_, counts) = compile_to_native(&circuit).unwrap();
        xs.push(n as f64);
        ys.push(counts.sqrt_iswap as f64);
        if n == 72 {
            at72 = counts.sqrt_iswap;
        }
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    let soft = (at72 as f64 - 400.0).abs() <= 60.0;
    check(
        r2 > 0.99,
        format!(
            "R^2 = {r2:.5}, slope {slope:.3}/qubit; N=72 count {at72} (soft +-15% of 400: {})",
            if soft { "met" } else { "missed" }
        ),
    )
}

fn c11_mps_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut trunc: f64 = 0.0;
    for n in 2..=16usize {
        for s in 0..3u64 {
            let p = gen_sk(n, 80_000 + 10 * n as u64 + s).unwrap();
            let sampler = MpsSampler::random(&p, 16, &mut rng_for(s, 0)).unwrap();
            let angles = QaoaAngles::p1(0.3 + 0.5 * s as f64, 0.2 + 0.3 * s as f64);
            let circuit = sampler.ansatz().circuit(&p, &angles).unwrap();
            let mut dense = vec![C64::default(); 1 << n];
            dense[0] = C64::new(1.0, 0.0);
            apply_circuit(&mut dense, &circuit);
            let state = sampler.state(&angles).unwrap();
            let amps = state.to_statevector().unwrap();
            let overlap: C64 = amps.iter().zip(&dense).map(|(a, b)| a.conj() * b).sum();
            let phase = overlap / overlap.norm();
            let d = amps.iter().zip(&dense).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max);
            worst = worst.max(d);
            trunc = trunc.max(state.truncation_error());
        }
    }
    check(
        worst < 1e-8 && trunc == 0.0,
        format!("max amplitude deviation {worst:.2e}, truncation error {trunc:e} at chi_max 16"),
    )
}

fn c12_extreme_value() -> Outcome {
    let n = 40;
    let mut detail = Vec::new();
    let mut ok = true;
    for m in [1_000usize, 10_000] {
        let bests: Vec<f64> = (0..200u64)
            .into_par_iter()
            .map(|s| {
                let p = gen_sk(n, 90_000 + s).unwrap();
                let d = p.dense();
                uniform_bitstrings(n, m, &mut rng_for(s, m as u64))
                    .iter()
                    .map(|b| d.cost_spins(&(0..n).map(|i| b.z(i)).collect::<Vec<_>>()))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let want = best_random_expected_cost(n, m as f64);
        let rel = (mean(&bests) / want - 1.0).abs();
        ok &= rel < 0.05;
        detail.push(format!("M={m}: {:.2} vs {want:.2} ({:.1}%)", mean(&bests), 100.0 * rel));
    }
    check(ok, detail.join(", "))
}

fn c13_spectrum() -> Outcome {
    let mut merged = SpectrumHistogram::default();
    let mut degeneracy = Vec::new();
    for s in 0..1000u64 {
        let p = gen_sk(8, 100_000 + s).unwrap();
        merged.merge(&spectrum_histogram(&p, BRUTE_FORCE_CAP).unwrap());
        degeneracy.push(brute_force(&p, BRUTE_FORCE_CAP).unwrap().argmin_count as f64);
    }
    let (_, _, skew) = merged.moments();
    let deg = mean(&degeneracy);
    check(
        skew.abs() < 0.05 && (2.0..=4.0).contains(&deg),
        format!("skewness {skew:+.4}, mean optimum degeneracy {deg:.3}"),
    )
}

fn c14_constrained() -> Outcome {
    let grid = GridSpec { n_gamma: 8, n_beta: 8 };
    let results: Vec<(bool, Option<(f64, f64)>)> = (0..100u64)
        .into_par_iter()
        .map(|s| {
            let n = 8 + (s % 7) as usize;
            let (p, cs) = gen_portfolio(n, 110_000 + s, 0.5, 0.6).unwrap();
            let Some(bf) = brute_force_constrained(&p, &cs, BRUTE_FORCE_CAP).unwrap() else {
                return (true, None);
            };
            let ratio = RatioPolicy::Given { c_min: bf.c_min, c_max: bf.c_max };
            let mut feasible = true;
            let mut r = [0.0; 2];
            for (i, filter) in [false, true].into_iter().enumerate() {
                let cfg = EngineConfig {
                    selection: SourceKind::Statevector,
                    decision: SourceKind::Statevector,
                    grid,
                    filter_infeasible: filter,
                    seed: s,
                    ratio,
                    ..EngineConfig::default()
                };
                let t = greedy::run(&p, &cs, &cfg).unwrap();
                feasible &= check_constraints(&cs, &t.final_bits) && t.feasible;
                r[i] = t.final_ratio.unwrap().value;
            }
            (feasible, Some((r[0], r[1])))
        })
        .collect();
    let all_feasible = results.iter().all(|r| r.0);
    let pairs: Vec<(f64, f64)> = results.iter().filter_map(|r| r.1).collect();
    let plain: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let filtered: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ok = mean(&filtered) >= mean(&plain) - std_err(&plain);
    check(
        all_feasible && ok,
        format!(
            "{} instances, all feasible: {all_feasible}; filtered {:.4} vs unfiltered {:.4} (se {:.4})",
            pairs.len(),
            mean(&filtered),
            mean(&plain),
            std_err(&plain)
        ),
    )
}

fn c15_mps_large() -> Outcome {
    if std::env::var("QEGREEDY_FULL_MPS").as_deref() != Ok("1") {
        return Outcome::Skip("N = 72 MPS study needs QEGREEDY_FULL_MPS=1 (multi-hour)".into());
    }
    let count: u64 = std::env::var("QEGREEDY_MPS_INSTANCES").ok().and_then(|v| v.parse().ok()).unwrap_or(20);
    let rs: Vec<f64> = (0..count)
        .map(|s| {
            let p = gen_sk(72, 120_000 + s).unwrap();
            let cfg = EngineConfig {
                selection: SourceKind::Mps,
                decision: SourceKind::Mps,
                chi_max: DEFAULT_CHI_MAX,
                seed: s,
                ratio: RatioPolicy::SkProxy,
                ..EngineConfig::default()
            };
            let r = greedy::run(&p, &[], &cfg).unwrap().final_ratio.unwrap().value;
            eprintln!("  instance {s}: r = {r:.4}");
            r
        })
        .collect();
    let m = mean(&rs);
    check(
        (0.93..=0.97).contains(&m),
        format!("mean r = {m:.4} +- {:.4} over {count} instances (need [0.93, 0.97])", std_err(&rs)),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 15] = [
    (1, "classical greedy asymptote", c1_greedy_asymptote),
    (2, "greedy ratio vs N", c2_greedy_ratio_curve),
    (3, "ring and 3-regular greedy", c3_sparse_baselines),
    (4, "analytic constants", c4_analytic_constants),
    (5, "engine equivalence", c5_engine_equivalence),
    (6, "quantum enhancement", c6_quantum_enhancement),
    (7, "ablation ordering", c7_ablation),
    (8, "optimality preservation", c8_optimality_preservation),
    (9, "gate decompositions", c9_decompositions),
    (10, "gate counting", c10_gate_counts),
    (11, "MPS exactness", c11_mps_exactness),
    (12, "extreme-value formula", c12_extreme_value),
    (13, "spectrum symmetry", c13_spectrum),
    (14, "constrained runs", c14_constrained),
    (15, "N = 72 MPS ensemble", c15_mps_large),
];

fn main() -> ExitCode {
    let only: Option<Vec<u32>> = std::env::var("QEGREEDY_CRITERIA")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, f) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} {tag} {name}: {detail} [{secs:.1}s]");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
