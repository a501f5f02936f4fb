//! Quantum-enhanced greedy optimization of Ising objectives.
//!
//! The solver repeatedly samples bit strings, picks the variable whose
//! couplings look most decided across the batch, fixes it to the spin that
//! lowers the averaged cost, and folds it into a smaller problem. Samples come
//! from uniform noise, exact one-layer QAOA
//! statevectors, or a matrix-product-state simulation of a shallow truncated
//! QAOA circuit.
//!
//! ```
//! use qegreedy::ising::{brute_force, gen_sk, BRUTE_FORCE_CAP};
//!
//! let problem = gen_sk(8, 1).unwrap();
//! let exact = brute_force(&problem, BRUTE_FORCE_CAP).unwrap();
//! assert!(exact.c_min < 0.0 && exact.c_max > 0.0);
//! ```

pub mod baselines;
pub mod circuit;
pub mod error;
pub mod greedy;
pub mod ising;
pub mod metrics;
pub mod mps;
pub mod samplers;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/truncated-ansatz.md")]
    mod truncated_ansatz {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/ratios.md")]
    mod ratios {}
}
