//! Ising objectives, instance generators, constraints and exhaustive oracles.

mod bits;
mod brute;
mod constraints;
mod generate;
mod io;
mod problem;

pub use bits::{BitString, Spin};
pub use brute::{
    brute_force, brute_force_constrained, cost_table, spectrum_histogram, BruteForce, SpectrumHistogram,
    BRUTE_FORCE_CAP, BRUTE_FORCE_MAX, DEGENERACY_TOL,
};
pub use constraints::{
    check_constraints, feasibility_reachable, feasibility_reachable_exact, LinearConstraint, Sense,
    CONSTRAINT_TOL,
};
pub use generate::{gen_3regular, gen_portfolio, gen_ring, gen_sk};
pub use io::{load_problem, save_problem, ProblemFile};
pub use problem::{DenseProblem, IsingProblem, VarId};
