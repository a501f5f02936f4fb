use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

use super::bits::BitString;
use super::constraints::{LinearConstraint, Sense, CONSTRAINT_TOL};
use super::problem::{DenseProblem, IsingProblem};

/// Default limit on the number of active variables for exhaustive search.
pub const BRUTE_FORCE_CAP: usize = 24;
/// Hard ceiling that no configured cap may exceed.
pub const BRUTE_FORCE_MAX: usize = 28;
/// Costs within this distance of the minimum count as degenerate optima.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub c_min: f64,
    pub c_max: f64,
    /// Number of assignments of the active variables attaining `c_min`.
    pub argmin_count: u64,
    pub argmin: BitString,
    pub argmax: BitString,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(BRUTE_FORCE_MAX);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "active variables for exhaustive enumeration",
            size: n,
            cap,
        });
    }
    Ok(())
}

/// Visits every assignment of the dense variables in Gray-code order, calling
/// `f(index, flipped, cost)` where `index` has bit `a` set when position `a`
/// holds `Z = -1` and `flipped` is the position changed from the previous
/// visit (`None` on the first). Visits only half the space when `half` is set,
/// keeping the last position at `Z = +1`.
fn gray_walk(d: &DenseProblem, half: bool, mut f: impl FnMut(u64, Option<usize>, f64)) {
    let n = d.n();
    let mut z = vec![1.0; n];
    let mut h: Vec<f64> = (0..n).map(|a| d.v[a] + d.row(a).iter().sum::<f64>()).collect();
    let mut cost = d.cost_spins(&z);
    let bits = if half { n - 1 } else { n };
    let mut index = 0u64;
    f(index, None, cost);
    for t in 1u64..(1u64 << bits) {
        let j = t.trailing_zeros() as usize;
        cost -= 2.0 * z[j] * h[j];
        z[j] = -z[j];
        index ^= 1 << j;
        let s = 2.0 * z[j];
        for (ha, &wa) in h.iter_mut().zip(d.row(j)) {
            *ha += s * wa;
        }
        f(index, Some(j), cost);
    }
}

fn expand(problem: &IsingProblem, d: &DenseProblem, index: u64) -> BitString {
    let mut b = BitString::zeros(problem.n_total());
    problem.fill_frozen(&mut b);
    for (a, &id) in d.ids.iter().enumerate() {
        b.set(id, ((index >> a) & 1) as u8);
    }
    b
}

/// Exact extrema over all assignments of the active variables.
pub fn brute_force(problem: &IsingProblem, cap: usize) -> Result<BruteForce> {
    let d = problem.dense();
    let n = d.n();
    check_cap(n, cap)?;
    // Without fields the spectrum is invariant under a global flip.
    let half = n >= 1 && !d.has_linear_terms();
    let mut best = (f64::INFINITY, 0u64, 0u64);
    let mut worst = (f64::NEG_INFINITY, 0u64);
    gray_walk(&d, half, |index, _, c| {
        if c < best.0 - DEGENERACY_TOL {
            best = (c, 1, index);
        } else if (c - best.0).abs() <= DEGENERACY_TOL {
            best.1 += 1;
        }
        if c > worst.0 {
            worst = (c, index);
        }
    });
    let count = if half { 2 * best.1 } else { best.1 };
    Ok(BruteForce {
        c_min: best.0,
        c_max: worst.0,
        argmin_count: count,
        argmin: expand(problem, &d, best.2),
        argmax: expand(problem, &d, worst.1),
    })
}

/// Extrema over the assignments that satisfy every constraint, or `None` when
/// no assignment does. Frozen variables keep their spins.
pub fn brute_force_constrained(
    problem: &IsingProblem,
    constraints: &[LinearConstraint],
    cap: usize,
) -> Result<Option<BruteForce>> {
    let d = problem.dense();
    let n = d.n();
    check_cap(n, cap)?;
    let pos: BTreeMap<usize, usize> = d.ids.iter().enumerate().map(|(a, &id)| (id, a)).collect();
    let mut lhs = Vec::with_capacity(constraints.len());
    let mut coef = Vec::with_capacity(constraints.len());
    for c in constraints {
        let mut base = 0.0;
        let mut row = vec![0.0; n];
        for (&id, &x) in c.coeffs() {
            match (pos.get(&id), problem.frozen().get(&id)) {
                (Some(&a), _) => row[a] += x,
                (None, Some(s)) => base += x * s.value(),
                (None, None) => {
                    return Err(Error::VariableOutOfRange {
                        id,
                        n: problem.n_total(),
                    })
                }
            }
        }
        lhs.push(base + row.iter().sum::<f64>());
        coef.push(row);
    }
    let mut z = vec![1.0; n];
    let mut best: Option<(f64, u64, u64)> = None;
    let mut worst: Option<(f64, u64)> = None;
    gray_walk(&d, false, |index, flipped, c| {
        if let Some(j) = flipped {
            z[j] = -z[j];
            for (l, row) in lhs.iter_mut().zip(&coef) {
                *l += 2.0 * z[j] * row[j];
            }
        }
        let ok = constraints.iter().zip(&lhs).all(|(con, &l)| match con.sense() {
            Sense::Le => l <= con.bound() + CONSTRAINT_TOL,
            Sense::Ge => l >= con.bound() - CONSTRAINT_TOL,
        });
        if !ok {
            return;
        }
        match &mut best {
            Some(b) if c >= b.0 - DEGENERACY_TOL => {
                if (c - b.0).abs() <= DEGENERACY_TOL {
                    b.1 += 1;
                }
            }
            _ => best = Some((c, 1, index)),
        }
        match &mut worst {
            Some(w) if c <= w.0 => {}
            _ => worst = Some((c, index)),
        }
    });
    Ok(best.zip(worst).map(|(b, w)| BruteForce {
        c_min: b.0,
        c_max: w.0,
        argmin_count: b.1,
        argmin: expand(problem, &d, b.2),
        argmax: expand(problem, &d, w.1),
    }))
}

/// Multiplicity of every cost value over the assignments of the active
/// variables. Costs are binned on a grid of `1e-9`, which is exact for integer
/// and half-integer objectives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpectrumHistogram {
    // bin key -> (first cost seen in the bin, multiplicity)
    bins: BTreeMap<i64, (f64, u64)>,
}

const SPECTRUM_QUANTUM: f64 = 1e-9;

impl SpectrumHistogram {
    fn key(c: f64) -> i64 {
        (c / SPECTRUM_QUANTUM).round() as i64
    }

    /// `(cost, multiplicity)` in increasing cost order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.bins.values().copied()
    }

    pub fn multiplicity(&self, cost: f64) -> u64 {
        self.bins.get(&Self::key(cost)).map_or(0, |b| b.1)
    }

    pub fn total(&self) -> u64 {
        self.bins.values().map(|b| b.1).sum()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.iter().next().map(|(c, _)| c)
    }

    pub fn max(&self) -> Option<f64> {
        self.bins.values().next_back().map(|b| b.0)
    }

    /// Adds another histogram's counts into this one.
    pub fn merge(&mut self, other: &SpectrumHistogram) {
        for (&k, &(c, m)) in &other.bins {
            self.bins.entry(k).or_insert((c, 0)).1 += m;
        }
    }

    /// Mean, variance and skewness of the cost over all counted strings.
    pub fn moments(&self) -> (f64, f64, f64) {
        let total = self.total() as f64;
        let mean = self.iter().map(|(c, m)| c * m as f64).sum::<f64>() / total;
        let (m2, m3) = self.iter().fold((0.0, 0.0), |(a, b), (c, m)| {
            let d = c - mean;
            (a + d * d * m as f64, b + d * d * d * m as f64)
        });
        let var = m2 / total;
        let skew = if var > 0.0 { (m3 / total) / var.powf(1.5) } else { 0.0 };
        (mean, var, skew)
    }
}

impl Serialize for SpectrumHistogram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, u64)> = self.iter().collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectrumHistogram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(f64, u64)>::deserialize(d)?;
        let mut bins = BTreeMap::new();
        for (c, m) in pairs {
            bins.entry(Self::key(c)).or_insert((c, 0)).1 += m;
        }
        Ok(SpectrumHistogram { bins })
    }
}

pub fn spectrum_histogram(problem: &IsingProblem, cap: usize) -> Result<SpectrumHistogram> {
    let d = problem.dense();
    check_cap(d.n(), cap)?;
    let mut counts: HashMap<i64, (f64, u64)> = HashMap::new();
    gray_walk(&d, false, |_, _, c| {
        counts.entry(SpectrumHistogram::key(c)).or_insert((c, 0)).1 += 1;
    });
    Ok(SpectrumHistogram {
        bins: counts.into_iter().collect(),
    })
}

/// Cost of every assignment of the dense variables, indexed as in
/// [`DenseProblem::cost_index`].
pub fn cost_table(d: &DenseProblem, cap: usize) -> Result<Vec<f64>> {
    check_cap(d.n(), cap)?;
    let mut table = vec![0.0; 1usize << d.n()];
    gray_walk(d, false, |index, _, c| table[index as usize] = c);
    Ok(table)
}
