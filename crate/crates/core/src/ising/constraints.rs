use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bits::{BitString, Spin};
use super::problem::VarId;

/// Slack allowed when comparing a constraint sum against its bound.
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
}

/// `sum_i c_i Z_i <= bound` or `>= bound`, over spin values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    #[serde(with = "coeff_pairs")]
    coeffs: BTreeMap<VarId, f64>,
    bound: f64,
    sense: Sense,
}

mod coeff_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::VarId;

    pub fn serialize<S: Serializer>(m: &BTreeMap<VarId, f64>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(VarId, f64)> = m.iter().map(|(&i, &x)| (i, x)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<VarId, f64>, D::Error> {
        let pairs = Vec::<(VarId, f64)>::deserialize(d)?;
        let mut m = BTreeMap::new();
        for (i, x) in pairs {
            *m.entry(i).or_insert(0.0) += x;
        }
        Ok(m)
    }
}

impl LinearConstraint {
    pub fn new(coeffs: BTreeMap<VarId, f64>, bound: f64, sense: Sense) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("constraint has no coefficients".into()));
        }
        Ok(LinearConstraint { coeffs, bound, sense })
    }

    /// `sum_{i < n} Z_i (sense) bound`.
    pub fn count(n: usize, bound: f64, sense: Sense) -> Result<Self> {
        Self::new((0..n).map(|i| (i, 1.0)).collect(), bound, sense)
    }

    pub fn coeffs(&self) -> &BTreeMap<VarId, f64> {
        &self.coeffs
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn max_id(&self) -> VarId {
        *self.coeffs.keys().next_back().expect("coefficients are non-empty")
    }

    pub fn lhs(&self, b: &BitString) -> f64 {
        self.coeffs.iter().map(|(&i, &c)| c * b.z(i)).sum()
    }

    fn accepts(&self, lhs: f64) -> bool {
        match self.sense {
            Sense::Le => lhs <= self.bound + CONSTRAINT_TOL,
            Sense::Ge => lhs >= self.bound - CONSTRAINT_TOL,
        }
    }

    pub fn holds(&self, b: &BitString) -> bool {
        self.accepts(self.lhs(b))
    }

    /// Whether some completion of the variables absent from `fixed` satisfies
    /// this constraint alone.
    pub fn reachable(&self, fixed: &BTreeMap<VarId, Spin>) -> bool {
        let mut lhs = 0.0;
        for (&i, &c) in &self.coeffs {
            lhs += match fixed.get(&i) {
                Some(s) => c * s.value(),
                None => match self.sense {
                    Sense::Le => -c.abs(),
                    Sense::Ge => c.abs(),
                },
            };
        }
        self.accepts(lhs)
    }
}

pub fn check_constraints(constraints: &[LinearConstraint], b: &BitString) -> bool {
    constraints.iter().all(|c| c.holds(b))
}

/// Per-constraint relaxation: each constraint is checked against its own best
/// completion of the free variables. A `false` answer is always correct; a
/// `true` answer may miss joint conflicts between constraints.
pub fn feasibility_reachable(constraints: &[LinearConstraint], fixed: &BTreeMap<VarId, Spin>) -> bool {
    constraints.iter().all(|c| c.reachable(fixed))
}

/// Exact joint reachability by enumerating the free variables referenced by
/// the constraints. Refuses when more than `cap` variables are free.
pub fn feasibility_reachable_exact(
    constraints: &[LinearConstraint],
    fixed: &BTreeMap<VarId, Spin>,
    cap: usize,
) -> Result<bool> {
    if !feasibility_reachable(constraints, fixed) {
        return Ok(false);
    }
    let free: Vec<VarId> = constraints
        .iter()
        .flat_map(|c| c.coeffs.keys().copied())
        .filter(|i| !fixed.contains_key(i))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if free.len() > cap {
        return Err(Error::CapExceeded {
            what: "free variables for exact reachability",
            size: free.len(),
            cap,
        });
    }
    let pos: BTreeMap<VarId, usize> = free.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    // lhs = base + sum_p coef[p] * z_p for each constraint
    let rows: Vec<(f64, Vec<f64>)> = constraints
        .iter()
        .map(|c| {
            let mut base = 0.0;
            let mut coef = vec![0.0; free.len()];
            for (&i, &x) in &c.coeffs {
                match fixed.get(&i) {
                    Some(s) => base += x * s.value(),
                    None => coef[pos[&i]] += x,
                }
            }
            (base, coef)
        })
        .collect();
    for index in 0..(1u64 << free.len()) {
        let ok = constraints.iter().zip(&rows).all(|(c, (base, coef))| {
            let lhs = base
                + coef
                    .iter()
                    .enumerate()
                    .map(|(p, &x)| if (index >> p) & 1 == 0 { x } else { -x })
                    .sum::<f64>();
            c.accepts(lhs)
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_list_accepts() {
        assert!(check_constraints(&[], &BitString::zeros(4)));
    }

    #[test]
    fn all_minus_satisfies_nonpositive_sum() {
        let c = LinearConstraint::count(5, 0.0, Sense::Le).unwrap();
        assert!(c.holds(&BitString::from_bits(vec![1; 5]).unwrap()));
    }

    #[test]
    fn all_plus_exceeds_half_size() {
        let n = 8;
        let c = LinearConstraint::count(n, n as f64 / 2.0, Sense::Le).unwrap();
        assert!(!check_constraints(&[c], &BitString::zeros(n)));
    }

    #[test]
    fn empty_coefficients_rejected() {
        assert!(LinearConstraint::new(BTreeMap::new(), 0.0, Sense::Le).is_err());
    }

    #[test]
    fn reachability_basics() {
        let n = 6;
        let loose = LinearConstraint::count(n, 0.0, Sense::Le).unwrap();
        assert!(feasibility_reachable(&[loose], &BTreeMap::new()));
        let tight = LinearConstraint::count(n, -(n as f64), Sense::Le).unwrap();
        let fixed = BTreeMap::from([(3, Spin::Plus)]);
        assert!(!feasibility_reachable(std::slice::from_ref(&tight), &fixed));
        assert!(!feasibility_reachable_exact(&[tight], &fixed, 20).unwrap());
    }

    #[test]
    fn relaxation_can_miss_joint_conflict() {
        // Z0 + Z1 <= -2 needs both -1, Z0 >= 1 needs Z0 = +1.
        let a = LinearConstraint::count(2, -2.0, Sense::Le).unwrap();
        let b = LinearConstraint::new(BTreeMap::from([(0, 1.0)]), 1.0, Sense::Ge).unwrap();
        let cs = [a, b];
        assert!(feasibility_reachable(&cs, &BTreeMap::new()));
        assert!(!feasibility_reachable_exact(&cs, &BTreeMap::new(), 20).unwrap());
    }

    #[test]
    fn serde_roundtrip() {
        let c = LinearConstraint::new(BTreeMap::from([(0, 0.25), (3, 0.1)]), -0.3, Sense::Ge).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"coeffs":[[0,0.25],[3,0.1]],"bound":-0.3,"sense":"ge"}"#);
        assert_eq!(serde_json::from_str::<LinearConstraint>(&text).unwrap(), c);
    }

    fn brute_completion(cs: &[LinearConstraint], n: usize, fixed: &BTreeMap<VarId, Spin>) -> bool {
        (0..(1u64 << n)).any(|index| {
            let mut b = BitString::from_index(index, n);
            for (&i, &s) in fixed {
                b.set_spin(i, s);
            }
            check_constraints(cs, &b)
        })
    }

    proptest! {
        #[test]
        fn exact_matches_completion_search(seed in 0u64..500) {
            let n = 10;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mu: BTreeMap<VarId, f64> = (0..n).map(|i| (i, rng.gen_range(0.01..1.0))).collect();
            let total: f64 = mu.values().sum();
            let cs = vec![
                LinearConstraint::count(n, rng.gen_range(-6..=6) as f64, Sense::Le).unwrap(),
                LinearConstraint::new(mu, rng.gen_range(-0.5..0.5) * total, Sense::Ge).unwrap(),
            ];
            let mut fixed = BTreeMap::new();
            for i in 0..n {
                if rng.gen_bool(0.4) {
                    fixed.insert(i, if rng.gen() { Spin::Plus } else { Spin::Minus });
                }
            }
            let truth = brute_completion(&cs, n, &fixed);
            prop_assert_eq!(feasibility_reachable_exact(&cs, &fixed, 20).unwrap(), truth);
            for c in &cs {
                prop_assert_eq!(c.reachable(&fixed), brute_completion(std::slice::from_ref(c), n, &fixed));
            }
            if truth {
                prop_assert!(feasibility_reachable(&cs, &fixed));
            }
        }
    }
}
