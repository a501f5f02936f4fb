//! Gate-level circuits, native-gate decompositions and dense simulation.

mod compile;
mod decompose;
mod gates;
mod sim;

pub use compile::{compile_to_native, NativeCounts};
pub use decompose::{
    decompose_rzz, decompose_rzz_swap, rzz_angles, rzz_native, rzz_swap_angles, rzz_swap_native,
    rzz_swap_native_any, synth_zxzxz, zyz_angles, RzzAngles, RzzSwapAngles,
};
pub use gates::{
    gate_matrix, hadamard_matrix, kron2, phase_distance, rx_angle_matrix, rx_matrix, rz_matrix, rzz_matrix,
    sqrt_iswap_matrix, swap_matrix, to_dmatrix, unitarity_error, Gate, GateMatrix, GateRecord, Qubit,
};
pub use sim::{apply_1q, apply_2q, apply_circuit, apply_gate, circuit_unitary, Circuit, UNITARY_CAP};
