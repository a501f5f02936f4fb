use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bits::Spin;
use super::constraints::LinearConstraint;
use super::problem::{IsingProblem, VarId};

/// On-disk layout of a problem file.
///
/// ```json
/// {"n": 2, "u": 0.0, "v": [[0, 0.5]], "w": [[0, 1, 1.0]], "constraints": []}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub v: Vec<(VarId, f64)>,
    #[serde(default)]
    pub w: Vec<(VarId, VarId, f64)>,
    #[serde(default)]
    pub constraints: Vec<LinearConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frozen: Vec<(VarId, Spin)>,
}

impl ProblemFile {
    pub fn from_problem(problem: &IsingProblem, constraints: &[LinearConstraint]) -> Self {
        ProblemFile {
            n: problem.n_total(),
            u: problem.offset(),
            v: problem.linear_terms().collect(),
            w: problem.couplings().collect(),
            constraints: constraints.to_vec(),
            frozen: problem.frozen().iter().map(|(&i, &s)| (i, s)).collect(),
        }
    }

    pub fn into_problem(self) -> Result<(IsingProblem, Vec<LinearConstraint>)> {
        let mut p = IsingProblem::new(self.n);
        p.set_offset(self.u);
        for (i, x) in self.v {
            p.add_linear(i, x)?;
        }
        for (i, j, x) in self.w {
            p.add_coupling(i, j, x)?;
        }
        for c in &self.constraints {
            if c.coeffs().is_empty() {
                return Err(Error::InvalidParameter("constraint has no coefficients".into()));
            }
            if c.max_id() >= self.n {
                return Err(Error::VariableOutOfRange { id: c.max_id(), n: self.n });
            }
        }
        // Frozen ids must not carry terms; freezing a term-free variable with
        // the stored spin leaves the offset unchanged.
        for (i, s) in self.frozen {
            if p.linear(i) != 0.0 || p.couplings().any(|(a, b, _)| a == i || b == i) {
                return Err(Error::InvalidParameter(format!(
                    "frozen variable {i} still has coefficients"
                )));
            }
            p = p.freeze_variable(i, s)?;
        }
        Ok((p, self.constraints))
    }
}

pub fn load_problem(path: &Path) -> Result<(IsingProblem, Vec<LinearConstraint>)> {
    let text = fs::read_to_string(path)?;
    let file: ProblemFile = serde_json::from_str(&text)?;
    file.into_problem()
}

pub fn save_problem(path: &Path, problem: &IsingProblem, constraints: &[LinearConstraint]) -> Result<()> {
    let text = serde_json::to_string_pretty(&ProblemFile::from_problem(problem, constraints))?;
    fs::write(path, text)?;
    Ok(())
}
