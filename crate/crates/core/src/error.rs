use thiserror::Error;

use crate::ising::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("variable {id} out of range for a problem with {n} variables")]
    VariableOutOfRange { id: VarId, n: usize },

    #[error("self-coupling on variable {0} is not allowed")]
    SelfCoupling(VarId),

    #[error("variable {0} is not active")]
    NotActive(VarId),

    #[error("no active variables left")]
    NoActiveVariables,

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("both spins of variable {0} leave the feasible region")]
    InfeasibleTrajectory(VarId),

    #[error("bond dimension {required} exceeds chi_max {chi_max} in exact mode")]
    TruncationRefused { required: usize, chi_max: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("angle {0} is outside the supported range [0, pi/2]")]
    UnsupportedRange(f64),

    #[error("argument {0} outside the domain of the decomposition formulas")]
    Domain(f64),

    #[error("unsupported gate for native compilation: {0}")]
    UnsupportedGate(String),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("degenerate spectrum: c_min == c_max == {0}")]
    DegenerateSpectrum(f64),

    #[error("unknown method: {0}")]
    UnknownMethod(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
