use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qegreedy::greedy::EngineConfig;
use qegreedy::ising::{gen_3regular, gen_portfolio, gen_ring, gen_sk, IsingProblem, LinearConstraint, BRUTE_FORCE_CAP};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Sk,
    Ring,
    ThreeRegular,
    Portfolio { density: f64, tightness: f64 },
}

impl Family {
    pub fn generate(&self, n: usize, seed: u64) -> qegreedy::Result<(IsingProblem, Vec<LinearConstraint>)> {
        match *self {
            Family::Sk => Ok((gen_sk(n, seed)?, vec![])),
            Family::Ring => Ok((gen_ring(n, seed)?, vec![])),
            Family::ThreeRegular => Ok((gen_3regular(n, seed)?, vec![])),
            Family::Portfolio { density, tightness } => gen_portfolio(n, seed, density, tightness),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Sk => "sk",
            Family::Ring => "ring",
            Family::ThreeRegular => "three_regular",
            Family::Portfolio { .. } => "portfolio",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

/// How each instance's ratio reference is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioChoice {
    /// Exhaustive extrema up to 24 variables, the SK estimate above that for
    /// SK instances, nothing otherwise.
    #[default]
    Auto,
    Exact,
    SkProxy,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodSpec {
    Engine {
        name: String,
        #[serde(default)]
        engine: EngineConfig,
    },
    ClassicalGreedy {
        name: String,
    },
    Spectral {
        name: String,
    },
    Annealing {
        name: String,
        #[serde(default)]
        sweeps: Option<usize>,
    },
    /// Best of `m` uniform strings.
    RandomBest {
        name: String,
        m: usize,
    },
    BruteForce {
        name: String,
    },
}

impl MethodSpec {
    pub fn name(&self) -> &str {
        match self {
            MethodSpec::Engine { name, .. }
            | MethodSpec::ClassicalGreedy { name }
            | MethodSpec::Spectral { name }
            | MethodSpec::Annealing { name, .. }
            | MethodSpec::RandomBest { name, .. }
            | MethodSpec::BruteForce { name } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub family: Family,
    pub sizes: Vec<usize>,
    pub seeds: SeedRange,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "one")]
    pub jobs: usize,
    #[serde(default)]
    pub ratio: RatioChoice,
    /// Engine fields merged into the named method's `engine` block.
    #[serde(default)]
    pub overrides: BTreeMap<String, serde_json::Map<String, serde_json::Value>>,
}

fn one() -> usize {
    1
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => config_err(format!("{}:{msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates, applying overrides. Errors carry `line:column`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| config_err(format!("{}:{}: {e}", e.line(), e.column())))?;
        cfg.apply_overrides()?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_overrides(&mut self) -> Result<(), CliError> {
        for (target, fields) in std::mem::take(&mut self.overrides) {
            let method = self
                .methods
                .iter_mut()
                .find(|m| m.name() == target)
                .ok_or_else(|| config_err(format!("override for unknown method '{target}'")))?;
            let MethodSpec::Engine { engine, .. } = method else {
                return Err(config_err(format!("method '{target}' is not an engine method")));
            };
            let mut value = serde_json::to_value(&*engine).expect("engine config serializes");
            let obj = value.as_object_mut().expect("engine config is an object");
            for (k, v) in fields.iter() {
                obj.insert(k.clone(), v.clone());
            }
            *engine = serde_json::from_value(value)
                .map_err(|e| config_err(format!("override for '{target}': {e}")))?;
            self.overrides.insert(target, fields);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let ok_name = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !ok_name(&self.name) {
            return Err(config_err("experiment name must be non-empty [A-Za-z0-9_-]"));
        }
        if self.methods.is_empty() {
            return Err(config_err("method list is empty"));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(config_err("sizes must be a non-empty list of values >= 2"));
        }
        if self.seeds.count == 0 {
            return Err(config_err("seeds.count must be positive"));
        }
        if self.jobs == 0 {
            return Err(config_err("jobs must be positive"));
        }
        let mut seen = BTreeSet::new();
        for m in &self.methods {
            if !ok_name(m.name()) {
                return Err(config_err(format!("method name '{}' must be non-empty [A-Za-z0-9_-]", m.name())));
            }
            if !seen.insert(m.name()) {
                return Err(config_err(format!("duplicate method name '{}'", m.name())));
            }
            match m {
                MethodSpec::Engine { engine, .. } => {
                    engine.validate().map_err(|e| config_err(format!("method '{}': {e}", m.name())))?;
                    if matches!(self.family, Family::Portfolio { .. }) && engine.k != 1 {
                        return Err(config_err(format!("method '{}': constrained runs need k = 1", m.name())));
                    }
                }
                MethodSpec::RandomBest { m: 0, .. } => {
                    return Err(config_err(format!("method '{}': m must be positive", m.name())));
                }
                MethodSpec::Annealing { sweeps: Some(0), .. } => {
                    return Err(config_err(format!("method '{}': sweeps must be positive", m.name())));
                }
                _ => {}
            }
        }
        if self.ratio == RatioChoice::Exact {
            if let Some(&n) = self.sizes.iter().find(|&&n| n > BRUTE_FORCE_CAP) {
                return Err(config_err(format!("exact ratios need n <= {BRUTE_FORCE_CAP}, got {n}")));
            }
        }
        if self.ratio == RatioChoice::SkProxy && self.family != Family::Sk {
            return Err(config_err("the sk_proxy ratio only applies to the sk family"));
        }
        Ok(())
    }
}
