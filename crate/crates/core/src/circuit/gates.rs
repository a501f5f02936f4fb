use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Qubit = usize;

const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// A gate with its targets. For two-qubit gates the first target is the high
/// bit of the 4x4 matrix index.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `exp(-i X k pi / 4)`.
    Rx { k: i32, q: Qubit },
    /// `exp(-i Z theta / 2)`.
    Rz { theta: f64, q: Qubit },
    /// `exp(i pi (XX + YY) / 8)`.
    SqrtISwap { a: Qubit, b: Qubit },
    /// `exp(-i phi ZZ / 2)`.
    Rzz { phi: f64, a: Qubit, b: Qubit },
    Swap { a: Qubit, b: Qubit },
    Hadamard { q: Qubit },
    Unitary1q { m: Matrix2<C64>, q: Qubit },
    Unitary2q { m: Matrix4<C64>, a: Qubit, b: Qubit },
}

/// Matrix for a gate acting on its own targets.
#[derive(Clone, Debug, PartialEq)]
pub enum GateMatrix {
    One(Matrix2<C64>),
    Two(Matrix4<C64>),
}

pub fn rx_matrix(k: i32) -> Matrix2<C64> {
    let t = k as f64 * std::f64::consts::FRAC_PI_4;
    let (s, co) = t.sin_cos();
    Matrix2::new(c(co), -I * s, -I * s, c(co))
}

pub fn rz_matrix(theta: f64) -> Matrix2<C64> {
    Matrix2::new(cis(-theta / 2.0), C64::default(), C64::default(), cis(theta / 2.0))
}

/// `exp(-i theta X / 2)` for any real angle.
pub fn rx_angle_matrix(theta: f64) -> Matrix2<C64> {
    let (s, co) = (theta / 2.0).sin_cos();
    Matrix2::new(c(co), -I * s, -I * s, c(co))
}

pub fn hadamard_matrix() -> Matrix2<C64> {
    Matrix2::new(c(1.0), c(1.0), c(1.0), c(-1.0)) * c(FRAC_1_SQRT_2)
}

pub fn rzz_matrix(phi: f64) -> Matrix4<C64> {
    let (m, p) = (cis(-phi / 2.0), cis(phi / 2.0));
    let z = C64::default();
    Matrix4::new(m, z, z, z, z, p, z, z, z, z, p, z, z, z, z, m)
}

pub fn sqrt_iswap_matrix() -> Matrix4<C64> {
    let z = C64::default();
    let one = c(1.0);
    let r = c(FRAC_1_SQRT_2);
    let ir = I * FRAC_1_SQRT_2;
    Matrix4::new(one, z, z, z, z, r, ir, z, z, ir, r, z, z, z, z, one)
}

pub fn swap_matrix() -> Matrix4<C64> {
    let z = C64::default();
    let one = c(1.0);
    Matrix4::new(one, z, z, z, z, z, one, z, z, one, z, z, z, z, z, one)
}

/// `A (x) B` with `A` on the high bit.
pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

impl Gate {
    pub fn targets(&self) -> Vec<Qubit> {
        match *self {
            Gate::Rx { q, .. } | Gate::Rz { q, .. } | Gate::Hadamard { q } | Gate::Unitary1q { q, .. } => vec![q],
            Gate::SqrtISwap { a, b }
            | Gate::Rzz { a, b, .. }
            | Gate::Swap { a, b }
            | Gate::Unitary2q { a, b, .. } => vec![a, b],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "rx",
            Gate::Rz { .. } => "rz",
            Gate::SqrtISwap { .. } => "sqrt_iswap",
            Gate::Rzz { .. } => "rzz",
            Gate::Swap { .. } => "swap",
            Gate::Hadamard { .. } => "h",
            Gate::Unitary1q { .. } => "u1q",
            Gate::Unitary2q { .. } => "u2q",
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(self, Gate::Rx { .. } | Gate::Rz { .. } | Gate::SqrtISwap { .. })
    }

    pub fn matrix(&self) -> GateMatrix {
        match self {
            Gate::Rx { k, .. } => GateMatrix::One(rx_matrix(*k)),
            Gate::Rz { theta, .. } => GateMatrix::One(rz_matrix(*theta)),
            Gate::Hadamard { .. } => GateMatrix::One(hadamard_matrix()),
            Gate::Unitary1q { m, .. } => GateMatrix::One(*m),
            Gate::SqrtISwap { .. } => GateMatrix::Two(sqrt_iswap_matrix()),
            Gate::Rzz { phi, .. } => GateMatrix::Two(rzz_matrix(*phi)),
            Gate::Swap { .. } => GateMatrix::Two(swap_matrix()),
            Gate::Unitary2q { m, .. } => GateMatrix::Two(*m),
        }
    }

    pub fn to_record(&self) -> GateRecord {
        let params = match self {
            Gate::Rx { k, .. } => vec![*k as f64],
            Gate::Rz { theta, .. } => vec![*theta],
            Gate::Rzz { phi, .. } => vec![*phi],
            Gate::Unitary1q { m, .. } => m.iter().flat_map(|z| [z.re, z.im]).collect(),
            Gate::Unitary2q { m, .. } => m.iter().flat_map(|z| [z.re, z.im]).collect(),
            _ => vec![],
        };
        GateRecord {
            kind: self.name().to_string(),
            params,
            targets: self.targets(),
        }
    }
}

pub fn gate_matrix(gate: &Gate) -> GateMatrix {
    gate.matrix()
}

/// JSON form of a gate: `{"kind": "rz", "params": [0.5], "targets": [3]}`.
/// Matrices are stored column-major as interleaved real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub params: Vec<f64>,
    pub targets: Vec<Qubit>,
}

impl GateRecord {
    pub fn to_gate(&self) -> Result<Gate> {
        let bad = || Error::UnsupportedGate(format!("malformed {} record", self.kind));
        let t = &self.targets;
        let p = &self.params;
        let one = || if t.len() == 1 { Ok(t[0]) } else { Err(bad()) };
        let two = || if t.len() == 2 { Ok((t[0], t[1])) } else { Err(bad()) };
        let complex = |n: usize| -> Result<Vec<C64>> {
            if p.len() != 2 * n {
                return Err(bad());
            }
            Ok(p.chunks_exact(2).map(|x| C64::new(x[0], x[1])).collect())
        };
        Ok(match self.kind.as_str() {
            "rx" if p.len() == 1 && p[0].fract() == 0.0 => Gate::Rx { k: p[0] as i32, q: one()? },
            "rz" if p.len() == 1 => Gate::Rz { theta: p[0], q: one()? },
            "rzz" if p.len() == 1 => {
                let (a, b) = two()?;
                Gate::Rzz { phi: p[0], a, b }
            }
            "sqrt_iswap" => {
                let (a, b) = two()?;
                Gate::SqrtISwap { a, b }
            }
            "swap" => {
                let (a, b) = two()?;
                Gate::Swap { a, b }
            }
            "h" => Gate::Hadamard { q: one()? },
            "u1q" => Gate::Unitary1q {
                m: Matrix2::from_column_slice(&complex(4)?),
                q: one()?,
            },
            "u2q" => {
                let (a, b) = two()?;
                Gate::Unitary2q {
                    m: Matrix4::from_column_slice(&complex(16)?),
                    a,
                    b,
                }
            }
            _ => return Err(bad()),
        })
    }
}

/// Largest deviation of `m^dagger m` from the identity.
pub fn unitarity_error(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for col in 0..n {
            let want = if r == col { c(1.0) } else { C64::default() };
            worst = worst.max((prod[(r, col)] - want).norm());
        }
    }
    worst
}

/// Operator-norm distance between `a` and `b` after removing the global phase
/// that best aligns their traces, `min_theta |a - e^{i theta} b|` evaluated at
/// `theta = arg tr(b^dagger a)`.
pub fn phase_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let overlap = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0) };
    let diff = a - b * phase;
    diff.singular_values().max()
}

pub fn to_dmatrix(m: &GateMatrix) -> DMatrix<C64> {
    match m {
        GateMatrix::One(x) => DMatrix::from_column_slice(2, 2, x.as_slice()),
        GateMatrix::Two(x) => DMatrix::from_column_slice(4, 4, x.as_slice()),
    }
}
