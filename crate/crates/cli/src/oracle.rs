use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde_json::{json, Value};

use qegreedy::circuit::{
    apply_circuit, circuit_unitary, decompose_rzz, decompose_rzz_swap, phase_distance, rzz_matrix, swap_matrix,
    to_dmatrix, GateMatrix,
};
use qegreedy::ising::{brute_force, load_problem, spectrum_histogram, gen_sk};
use qegreedy::mps::{MpsSampler, DEFAULT_CHI_MAX};
use qegreedy::samplers::{rng_for, QaoaAngles};

use crate::CliError;

pub fn brute_force_json(problem: &Path, cap: usize) -> Result<Value, CliError> {
    let (p, _) = load_problem(problem)?;
    let bf = brute_force(&p, cap)?;
    Ok(serde_json::to_value(bf).expect("serializes"))
}

pub fn spectrum_json(problem: &Path, cap: usize) -> Result<Value, CliError> {
    let (p, _) = load_problem(problem)?;
    let h = spectrum_histogram(&p, cap)?;
    let (mean, variance, skewness) = h.moments();
    Ok(json!({
        "levels": h.len(),
        "total": h.total(),
        "min": h.min(),
        "max": h.max(),
        "mean": mean,
        "variance": variance,
        "skewness": skewness,
        "histogram": h,
    }))
}

fn target(m: nalgebra::Matrix4<C64>) -> DMatrix<C64> {
    to_dmatrix(&GateMatrix::Two(m))
}

/// Largest deviations of the native `Rzz(phi)` (phi uniform on `[-pi, pi)`)
/// and `SWAP Rzz(phi)` (phi uniform on `[0, pi/2]`) circuits from their
/// targets, up to global phase.
pub fn decompose_check(count: usize, swap_count: usize, seed: u64) -> Result<Value, CliError> {
    let mut rng = rng_for(seed, 0);
    let mut worst_rzz: f64 = 0.0;
    for _ in 0..count {
        let phi = rng.gen_range(-PI..PI);
        let u = circuit_unitary(&decompose_rzz(phi)?)?;
        worst_rzz = worst_rzz.max(phase_distance(&u, &target(rzz_matrix(phi))));
    }
    let mut worst_swap: f64 = 0.0;
    for _ in 0..swap_count {
        let phi = rng.gen_range(0.0..=FRAC_PI_2);
        let u = circuit_unitary(&decompose_rzz_swap(phi)?)?;
        worst_swap = worst_swap.max(phase_distance(&u, &target(swap_matrix() * rzz_matrix(phi))));
    }
    Ok(json!({
        "rzz_count": count,
        "rzz_max_deviation": worst_rzz,
        "rzz_swap_count": swap_count,
        "rzz_swap_max_deviation": worst_swap,
        "max_deviation": worst_rzz.max(worst_swap),
    }))
}

/// Largest amplitude difference between the MPS and dense executions of the
/// truncated ansatz on an `n`-spin SK instance, after aligning global phase.
pub fn mps_diff(n: usize, seed: u64, gamma: f64, beta: f64) -> Result<Value, CliError> {
    let p = gen_sk(n, seed)?;
    let sampler = MpsSampler::random(&p, DEFAULT_CHI_MAX, &mut rng_for(seed, 0))?;
    let angles = QaoaAngles::p1(gamma, beta);
    let circuit = sampler.ansatz().circuit(&p, &angles)?;
    let mut dense = vec![C64::default(); 1 << n];
    dense[0] = C64::new(1.0, 0.0);
    apply_circuit(&mut dense, &circuit);
    let state = sampler.state(&angles)?;
    let mps = state.to_statevector()?;
    let overlap: C64 = mps.iter().zip(&dense).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    let worst = mps
        .iter()
        .zip(&dense)
        .map(|(a, b)| (a * phase - b).norm())
        .fold(0.0, f64::max);
    Ok(json!({
        "n": n,
        "seed": seed,
        "gamma": gamma,
        "beta": beta,
        "max_bond": state.max_bond(),
        "truncation_error": state.truncation_error(),
        "max_amplitude_deviation": worst,
    }))
}
