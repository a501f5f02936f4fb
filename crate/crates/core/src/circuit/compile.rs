use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::decompose::{rzz_native, rzz_swap_native_any, synth_zxzxz};
use super::gates::Gate;
use super::sim::Circuit;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeCounts {
    pub rx: usize,
    pub rz: usize,
    pub sqrt_iswap: usize,
}

impl NativeCounts {
    pub fn of(circuit: &Circuit) -> Result<NativeCounts> {
        let mut n = NativeCounts::default();
        for g in circuit.gates() {
            match g {
                Gate::Rx { .. } => n.rx += 1,
                Gate::Rz { .. } => n.rz += 1,
                Gate::SqrtISwap { .. } => n.sqrt_iswap += 1,
                other => return Err(Error::UnsupportedGate(other.name().into())),
            }
        }
        Ok(n)
    }

    pub fn total(&self) -> usize {
        self.rx + self.rz + self.sqrt_iswap
    }
}

fn same_pair(a: usize, b: usize, c: usize, d: usize) -> bool {
    (a == c && b == d) || (a == d && b == c)
}

/// Lowers a circuit over `{H, Rzz, Swap, Rx, Rz, sqrt(iSWAP), 1q unitaries}` to
/// native Rx/Rz/`sqrt(iSWAP)` gates. An `Rzz` immediately followed by a `Swap`
/// on the same pair is compiled as one three-`sqrt(iSWAP)` block.
pub fn compile_to_native(circuit: &Circuit) -> Result<(Circuit, NativeCounts)> {
    let mut out = Circuit::new(circuit.n_qubits());
    let gates = circuit.gates();
    let mut i = 0;
    while i < gates.len() {
        match &gates[i] {
            g @ (Gate::Rx { .. } | Gate::Rz { .. } | Gate::SqrtISwap { .. }) => out.push(g.clone())?,
            Gate::Hadamard { q } => {
                // H = i Rz(pi/2) Rx(1) Rz(pi/2)
                out.extend([
                    Gate::Rz { theta: FRAC_PI_2, q: *q },
                    Gate::Rx { k: 1, q: *q },
                    Gate::Rz { theta: FRAC_PI_2, q: *q },
                ])?;
            }
            Gate::Unitary1q { m, q } => out.extend(synth_zxzxz(m, *q))?,
            &Gate::Rzz { phi, a, b } => match gates.get(i + 1) {
                Some(&Gate::Swap { a: c, b: d }) if same_pair(a, b, c, d) => {
                    out.extend(rzz_swap_native_any(phi, a, b)?)?;
                    i += 1;
                }
                _ => out.extend(rzz_native(phi, a, b)?)?,
            },
            &Gate::Swap { a, b } => out.extend(rzz_swap_native_any(0.0, a, b)?)?,
            Gate::Unitary2q { .. } => return Err(Error::UnsupportedGate("u2q".into())),
        }
        i += 1;
    }
    let counts = NativeCounts::of(&out)?;
    Ok((out, counts))
}
