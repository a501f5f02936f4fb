use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::gates::{Gate, GateMatrix, GateRecord, Qubit};

/// Largest register for which [`circuit_unitary`] builds a dense matrix.
pub const UNITARY_CAP: usize = 10;

/// An ordered gate list over `n_qubits` qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate after checking that its targets are in range and distinct.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let t = gate.targets();
        if let Some(&q) = t.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::VariableOutOfRange { id: q, n: self.n_qubits });
        }
        if t.len() == 2 && t[0] == t[1] {
            return Err(Error::InvalidParameter(format!(
                "two-qubit gate {} acts twice on qubit {}",
                gate.name(),
                t[0]
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    pub fn to_json(&self) -> Result<String> {
        let dump = CircuitDump {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().map(Gate::to_record).collect(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let dump: CircuitDump = serde_json::from_str(text)?;
        let mut c = Circuit::new(dump.n_qubits);
        for r in &dump.gates {
            c.push(r.to_gate()?)?;
        }
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitDump {
    n_qubits: usize,
    gates: Vec<GateRecord>,
}

/// Applies a single-qubit matrix to qubit `q`; bit `q` of an amplitude index
/// is the state of qubit `q`.
pub fn apply_1q(state: &mut [C64], q: Qubit, m: &Matrix2<C64>) {
    let stride = 1usize << q;
    for base in (0..state.len()).step_by(2 * stride) {
        for i in base..base + stride {
            let (x0, x1) = (state[i], state[i + stride]);
            state[i] = m[(0, 0)] * x0 + m[(0, 1)] * x1;
            state[i + stride] = m[(1, 0)] * x0 + m[(1, 1)] * x1;
        }
    }
}

/// Applies a two-qubit matrix whose high index bit is qubit `a`.
pub fn apply_2q(state: &mut [C64], a: Qubit, b: Qubit, m: &Matrix4<C64>) {
    let (ma, mb) = (1usize << a, 1usize << b);
    for i in 0..state.len() {
        if i & (ma | mb) != 0 {
            continue;
        }
        let idx = [i, i | mb, i | ma, i | ma | mb];
        let x = idx.map(|k| state[k]);
        for (r, &k) in idx.iter().enumerate() {
            state[k] = (0..4).map(|col| m[(r, col)] * x[col]).sum();
        }
    }
}

pub fn apply_gate(state: &mut [C64], gate: &Gate) {
    let t = gate.targets();
    match gate.matrix() {
        GateMatrix::One(m) => apply_1q(state, t[0], &m),
        GateMatrix::Two(m) => apply_2q(state, t[0], t[1], &m),
    }
}

pub fn apply_circuit(state: &mut [C64], circuit: &Circuit) {
    for g in circuit.gates() {
        apply_gate(state, g);
    }
}

/// Dense unitary of a circuit on at most [`UNITARY_CAP`] qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let n = circuit.n_qubits();
    if n > UNITARY_CAP {
        return Err(Error::CapExceeded {
            what: "qubits for dense unitary",
            size: n,
            cap: UNITARY_CAP,
        });
    }
    let dim = 1usize << n;
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    let mut col = vec![C64::default(); dim];
    for j in 0..dim {
        col.iter_mut().for_each(|z| *z = C64::default());
        col[j] = C64::new(1.0, 0.0);
        apply_circuit(&mut col, circuit);
        u.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(u)
}
