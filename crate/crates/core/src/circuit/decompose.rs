use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::gates::{Gate, Qubit};
use super::sim::Circuit;

/// One factor of a single-qubit sequence written as a matrix product.
#[derive(Clone, Copy)]
enum Op {
    Z(f64),
    X(i32),
}

/// Emits a product written left to right (`Rz(a) Rx(1) Rz(b)`) in time order,
/// i.e. rightmost factor first.
fn emit(out: &mut Vec<Gate>, q: Qubit, product: &[Op]) {
    for op in product.iter().rev() {
        out.push(match *op {
            Op::Z(theta) => Gate::Rz { theta, q },
            Op::X(k) => Gate::Rx { k, q },
        });
    }
}

const X1: Op = Op::X(1);

/// `pi/2 - FRAC_PI_2`.
const FRAC_PI_2_LO: f64 = 6.123233995736766e-17;

/// `acos(x)` from `1 - x` and `1 + x`, both computed without cancellation.
fn acos_split(one_minus: f64, one_plus: f64) -> f64 {
    2.0 * one_minus.max(0.0).sqrt().atan2(one_plus.max(0.0).sqrt())
}

/// Internal angles of the two-`sqrt(iSWAP)` construction of `Rzz(phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RzzAngles {
    pub phi_tilde: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Reduces an angle to `[-pi, pi)`.
fn wrap_pi(phi: f64) -> f64 {
    phi - 2.0 * PI * ((phi + PI) / (2.0 * PI)).floor()
}

pub fn rzz_angles(phi: f64) -> Result<RzzAngles> {
    if !phi.is_finite() {
        return Err(Error::Domain(phi));
    }
    // With m = phi~ + pi/2 in [0, pi], both m and mc = pi - m enter under a
    // square root near the branch points phi = +-pi/2, so whichever is small
    // is computed directly from the distance of phi to +-pi/2, carrying the
    // low part of pi/2. The branch is unwrapped (gamma = pi/2) exactly when
    // phi lies in [-pi/2, pi/2).
    let p = wrap_pi(phi);
    let (m, mc, gamma) = if p >= 0.0 {
        let d = (FRAC_PI_2 - p) + FRAC_PI_2_LO;
        if d > 0.0 {
            (PI - d, d, FRAC_PI_2)
        } else {
            (-d, PI + d, -FRAC_PI_2)
        }
    } else {
        let e = (p + FRAC_PI_2) + FRAC_PI_2_LO;
        if e >= 0.0 {
            (e, PI - e, FRAC_PI_2)
        } else {
            (PI + e, -e, -FRAC_PI_2)
        }
    };
    let phi_tilde = m - FRAC_PI_2;
    let half = phi_tilde / 2.0;
    let x = SQRT_2 * half.sin();
    if x.abs() > 1.0 + 1e-9 {
        return Err(Error::Domain(phi));
    }
    // asin(tan(phi~/2)) = atan2(sin(phi~/2), sqrt(cos phi~)) and cos phi~ = sin m.
    let sin_m = m.min(mc).sin();
    let alpha = half.sin().atan2(sin_m.max(0.0).sqrt());
    let one_minus = 2.0 * SQRT_2 * (m / 4.0).cos() * (mc / 4.0).sin();
    let one_plus = 2.0 * SQRT_2 * (m / 4.0).sin() * (mc / 4.0).cos();
    let beta = 2.0 * acos_split(one_minus, one_plus);
    Ok(RzzAngles {
        phi_tilde,
        alpha,
        beta,
        gamma,
    })
}

/// Native gates for `Rzz(phi)` on `(a, b)`: two `sqrt(iSWAP)` and Rx/Rz
/// layers, equal to the target up to a global phase.
pub fn rzz_native(phi: f64, a: Qubit, b: Qubit) -> Result<Vec<Gate>> {
    let RzzAngles {
        alpha, beta, gamma, ..
    } = rzz_angles(phi)?;
    let mut g = Vec::with_capacity(26);
    emit(&mut g, a, &[Op::Z(PI), X1, Op::Z(alpha), X1, Op::Z(FRAC_PI_2)]);
    emit(&mut g, b, &[Op::Z(FRAC_PI_2), X1, Op::Z(FRAC_PI_2)]);
    g.push(Gate::SqrtISwap { a, b });
    emit(&mut g, a, &[X1, Op::Z(beta), X1]);
    g.push(Gate::SqrtISwap { a, b });
    emit(&mut g, a, &[Op::Z(gamma), X1, Op::Z(alpha), X1, Op::Z(PI)]);
    emit(&mut g, b, &[Op::Z(gamma), X1, Op::Z(FRAC_PI_2)]);
    Ok(g)
}

/// Two-qubit circuit (first target qubit 0) realizing `Rzz(phi)`.
pub fn decompose_rzz(phi: f64) -> Result<Circuit> {
    let mut c = Circuit::new(2);
    c.extend(rzz_native(phi, 0, 1)?)?;
    Ok(c)
}

/// Internal angles of the three-`sqrt(iSWAP)` construction of
/// `SWAP Rzz(phi)` for `0 <= phi <= pi/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RzzSwapAngles {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: [f64; 4],
}

pub fn rzz_swap_angles(phi: f64) -> Result<RzzSwapAngles> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::UnsupportedRange(phi));
    }
    // delta = pi/2 - phi carried with the low part of pi/2, so that cos(phi)
    // and 1 - tan(phi/2) agree near phi = pi/2 where both enter under a root.
    let delta = (FRAC_PI_2 - phi) + FRAC_PI_2_LO;
    let (s, co) = (phi.sin(), delta.sin());
    let u = (2.0 * s * co).max(0.0).sqrt();
    // cos + sin = sqrt(1 + u^2)
    let r = (1.0 + u * u).sqrt();
    let one_minus_u = 2.0 * (FRAC_PI_4 - phi).sin().powi(2) / (1.0 + u);
    let sqrt2_minus_r = one_minus_u * (1.0 + u) / (SQRT_2 + r);
    // x+- = (r - 1 +- u) / sqrt(2)
    let xp_one_minus = (sqrt2_minus_r + one_minus_u) / SQRT_2;
    let xp_one_plus = (SQRT_2 - 1.0 + r + u) / SQRT_2;
    let xm_one_minus = (SQRT_2 + 1.0 - r + u) / SQRT_2;
    let xm_one_plus = (SQRT_2 - 1.0 + r - u) / SQRT_2;
    let sign = if phi <= FRAC_PI_4 { 1.0 } else { -1.0 };
    let alpha = sign * (acos_split(xp_one_minus, xp_one_plus) - PI);
    let beta = acos_split(xm_one_minus, xm_one_plus) - PI;

    let half = phi / 2.0;
    let t = half.tan();
    let t_one_minus = SQRT_2 * (delta / 2.0).sin() / half.cos();
    let lambda = -(t_one_minus.max(0.0).sqrt()).atan2((1.0 + t).sqrt());
    let psi = t.sqrt().atan();
    Ok(RzzSwapAngles {
        alpha,
        beta,
        zeta: [
            lambda + psi + FRAC_PI_2,
            lambda - psi + FRAC_PI_2,
            lambda + psi - PI,
            lambda - psi - PI,
        ],
    })
}

/// Native gates for `SWAP Rzz(phi)` on `(a, b)` with `phi` in `[0, pi/2]`:
/// three `sqrt(iSWAP)` and Rx/Rz layers.
pub fn rzz_swap_native(phi: f64, a: Qubit, b: Qubit) -> Result<Vec<Gate>> {
    let RzzSwapAngles { alpha, beta, zeta } = rzz_swap_angles(phi)?;
    let k = FRAC_PI_2;
    let h = FRAC_PI_2;
    let mut g = Vec::with_capacity(40);
    emit(&mut g, a, &[Op::Z(k), X1, Op::Z(k)]);
    emit(&mut g, b, &[Op::Z(h), X1, Op::Z(h)]);
    g.push(Gate::SqrtISwap { a, b });
    emit(&mut g, a, &[Op::Z(k), X1, Op::Z(zeta[0])]);
    emit(&mut g, b, &[Op::Z(h), X1, Op::Z(zeta[1])]);
    g.push(Gate::SqrtISwap { a, b });
    emit(&mut g, a, &[Op::Z(k), X1, Op::Z(alpha), X1, Op::Z(k)]);
    emit(&mut g, b, &[Op::Z(h), X1, Op::Z(beta), X1, Op::Z(h)]);
    g.push(Gate::SqrtISwap { a, b });
    emit(&mut g, a, &[Op::Z(k), X1, Op::Z(zeta[2]), X1, Op::Z(k)]);
    emit(&mut g, b, &[Op::Z(k), X1, Op::Z(zeta[3]), X1, Op::Z(h)]);
    Ok(g)
}

/// Two-qubit circuit realizing `SWAP Rzz(phi)` for `phi` in `[0, pi/2]`.
pub fn decompose_rzz_swap(phi: f64) -> Result<Circuit> {
    let mut c = Circuit::new(2);
    c.extend(rzz_swap_native(phi, 0, 1)?)?;
    Ok(c)
}

/// `SWAP Rzz(phi)` for any real `phi`, reduced onto `[0, pi/2]` with exact
/// Pauli identities:
///
/// * `Rzz(-phi) = (X (x) I) Rzz(phi) (X (x) I)` and `SWAP (X (x) I) = (I (x) X) SWAP`,
/// * `Rzz(phi +- pi)` equals `Rzz(phi) (Z (x) Z)` up to phase.
///
/// `X` and `Z` are emitted as `Rx(2)` and `Rz(pi)`.
pub fn rzz_swap_native_any(phi: f64, a: Qubit, b: Qubit) -> Result<Vec<Gate>> {
    if !phi.is_finite() {
        return Err(Error::UnsupportedRange(phi));
    }
    // (-pi, pi]
    let mut p = -wrap_pi(-phi);
    let mut pre = Vec::new();
    if p > FRAC_PI_2 || p < -FRAC_PI_2 {
        pre.push(Gate::Rz { theta: PI, q: a });
        pre.push(Gate::Rz { theta: PI, q: b });
        p = if p > 0.0 { p - PI } else { p + PI };
    }
    let mut post = Vec::new();
    if p < 0.0 {
        pre.push(Gate::Rx { k: 2, q: a });
        post.push(Gate::Rx { k: 2, q: b });
        p = -p;
    }
    let mut g = pre;
    g.extend(rzz_swap_native(p.min(FRAC_PI_2), a, b)?);
    g.extend(post);
    Ok(g)
}

/// Euler angles `(phi, theta, lambda)` with `m = e^{i delta} Rz(phi) Ry(theta) Rz(lambda)`.
pub fn zyz_angles(m: &Matrix2<C64>) -> (f64, f64, f64) {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let v = m / det.sqrt();
    let (c0, s0) = (v[(0, 0)].norm(), v[(1, 0)].norm());
    let theta = 2.0 * s0.atan2(c0);
    let sum = if c0 > 1e-14 { 2.0 * v[(1, 1)].arg() } else { 0.0 };
    let diff = if s0 > 1e-14 { 2.0 * v[(1, 0)].arg() } else { 0.0 };
    ((sum + diff) / 2.0, theta, (sum - diff) / 2.0)
}

/// Synthesizes a single-qubit unitary as `Rz Rx(1) Rz Rx(1) Rz`, returned in
/// time order. Equal to `m` up to a global phase.
pub fn synth_zxzxz(m: &Matrix2<C64>, q: Qubit) -> Vec<Gate> {
    let (phi, theta, lambda) = zyz_angles(m);
    let mut g = Vec::with_capacity(5);
    emit(&mut g, q, &[Op::Z(phi + PI), X1, Op::Z(theta + PI), X1, Op::Z(lambda)]);
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates::{rzz_matrix, swap_matrix, to_dmatrix, GateMatrix};
    use crate::circuit::sim::circuit_unitary;
    use crate::circuit::gates::phase_distance;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn rzz_target(phi: f64) -> DMatrix<C64> {
        to_dmatrix(&GateMatrix::Two(rzz_matrix(phi)))
    }

    fn swap_target(phi: f64) -> DMatrix<C64> {
        to_dmatrix(&GateMatrix::Two(swap_matrix() * rzz_matrix(phi)))
    }

    fn rzz_dev(phi: f64) -> f64 {
        phase_distance(&circuit_unitary(&decompose_rzz(phi).unwrap()).unwrap(), &rzz_target(phi))
    }

    fn swap_dev(phi: f64) -> f64 {
        phase_distance(&circuit_unitary(&decompose_rzz_swap(phi).unwrap()).unwrap(), &swap_target(phi))
    }

    fn count_sqrt_iswap(c: &Circuit) -> usize {
        c.gates().iter().filter(|g| matches!(g, Gate::SqrtISwap { .. })).count()
    }

    #[test]
    fn rzz_zero_and_quarter_turn() {
        assert!(rzz_dev(0.0) < 1e-10);
        let id = DMatrix::identity(4, 4);
        let u = circuit_unitary(&decompose_rzz(0.0).unwrap()).unwrap();
        assert!(phase_distance(&u, &id) < 1e-10);
        assert!(rzz_dev(FRAC_PI_2) < 1e-10);
        assert_eq!(count_sqrt_iswap(&decompose_rzz(0.3).unwrap()), 2);
    }

    #[test]
    fn rzz_branch_points() {
        for phi in [-PI, -FRAC_PI_2, -1e-12, 0.0, 1e-12, FRAC_PI_2, PI, 3.0 * PI, -7.5, 1e3] {
            assert!(rzz_dev(phi) < 1e-9, "phi = {phi}: {}", rzz_dev(phi));
        }
        for phi in [FRAC_PI_2, -FRAC_PI_2] {
            for eps in [1e-15, 1e-12, 1e-9] {
                let (hi, lo) = (rzz_dev(phi + eps), rzz_dev(phi - eps));
                assert!(hi < 1e-9 && lo < 1e-9, "phi = {phi}, eps = {eps}: {hi} {lo}");
            }
        }
        // The doubles nearest +-pi/2 both lie inside (-pi/2, pi/2).
        assert_eq!(rzz_angles(FRAC_PI_2).unwrap().gamma, FRAC_PI_2);
        assert_eq!(rzz_angles(-FRAC_PI_2).unwrap().gamma, FRAC_PI_2);
        assert_eq!(rzz_angles(FRAC_PI_2 + 1e-15).unwrap().gamma, -FRAC_PI_2);
        assert_eq!(rzz_angles(-FRAC_PI_2 - 1e-15).unwrap().gamma, -FRAC_PI_2);
        assert!(rzz_angles(f64::NAN).is_err());
    }

    #[test]
    fn rzz_swap_endpoints() {
        for phi in [0.0, 1e-12, FRAC_PI_4, FRAC_PI_4 - 1e-12, FRAC_PI_4 + 1e-12, FRAC_PI_2 - 1e-12, FRAC_PI_2] {
            assert!(swap_dev(phi) < 1e-9, "phi = {phi}: {}", swap_dev(phi));
        }
        let swap = to_dmatrix(&GateMatrix::Two(swap_matrix()));
        let u = circuit_unitary(&decompose_rzz_swap(1e-9).unwrap()).unwrap();
        assert!(phase_distance(&u, &swap) < 1e-8);
        assert_eq!(count_sqrt_iswap(&decompose_rzz_swap(0.4).unwrap()), 3);
        assert!(matches!(decompose_rzz_swap(-0.1), Err(Error::UnsupportedRange(_))));
        assert!(decompose_rzz_swap(FRAC_PI_2 + 1e-9).is_err());
    }

    #[test]
    fn rzz_swap_any_angle() {
        for i in 0..=80 {
            let phi = -2.0 * PI + i as f64 * PI / 20.0;
            let mut c = Circuit::new(2);
            c.extend(rzz_swap_native_any(phi, 0, 1).unwrap()).unwrap();
            let d = phase_distance(&circuit_unitary(&c).unwrap(), &swap_target(phi));
            assert!(d < 1e-9, "phi = {phi}: {d}");
        }
    }

    #[test]
    fn reversed_targets() {
        let mut c = Circuit::new(2);
        c.extend(rzz_native(0.9, 1, 0).unwrap()).unwrap();
        assert!(phase_distance(&circuit_unitary(&c).unwrap(), &rzz_target(0.9)) < 1e-9);
        let mut c = Circuit::new(2);
        c.extend(rzz_swap_native(0.9, 1, 0).unwrap()).unwrap();
        assert!(phase_distance(&circuit_unitary(&c).unwrap(), &swap_target(0.9)) < 1e-9);
    }

    fn random_unitary(a: f64, b: f64, c: f64, d: f64) -> Matrix2<C64> {
        let e = |t: f64| C64::from_polar(1.0, t);
        let (s, co) = b.sin_cos();
        Matrix2::new(e(a) * co, e(c) * s, -e(d - c) * s, e(d - a) * co) * e(0.37)
    }

    proptest! {
        #[test]
        fn rzz_any_phi(phi in -PI..PI) {
            prop_assert!(rzz_dev(phi) < 1e-9);
        }

        #[test]
        fn rzz_near_branch_points(side in prop::sample::select(vec![-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI]),
                                  exp in -16.0f64..-3.0, neg in any::<bool>()) {
            let eps = if neg { -(10f64.powf(exp)) } else { 10f64.powf(exp) };
            prop_assert!(rzz_dev(side + eps) < 1e-9);
        }

        #[test]
        fn rzz_swap_branch(phi in 0.0..=FRAC_PI_2) {
            prop_assert!(swap_dev(phi) < 1e-9);
        }

        #[test]
        fn rzz_swap_near_endpoints(side in prop::sample::select(vec![0.0, FRAC_PI_4, FRAC_PI_2]),
                                   exp in -16.0f64..-3.0, neg in any::<bool>()) {
            let eps = if neg { -(10f64.powf(exp)) } else { 10f64.powf(exp) };
            let phi = (side + eps).clamp(0.0, FRAC_PI_2);
            prop_assert!(swap_dev(phi) < 1e-9);
        }

        #[test]
        fn zxzxz_matches(a in -PI..PI, b in 0.0..FRAC_PI_2, c in -PI..PI, d in -PI..PI) {
            let m = random_unitary(a, b, c, d);
            let mut circ = Circuit::new(1);
            circ.extend(synth_zxzxz(&m, 0)).unwrap();
            let u = circuit_unitary(&circ).unwrap();
            prop_assert!(phase_distance(&u, &to_dmatrix(&GateMatrix::One(m))) < 1e-9);
        }
    }
}
