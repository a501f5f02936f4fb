use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::bits::{BitString, Spin};

pub type VarId = usize;

/// Sparse Ising objective `C = u + sum_i v_i Z_i + sum_{i<j} w_ij Z_i Z_j`.
///
/// Variable ids are never renumbered. Freezing a variable moves it from the
/// active set to `frozen` and folds its terms into lower-order coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingProblem {
    n_total: usize,
    u: f64,
    v: BTreeMap<VarId, f64>,
    w: BTreeMap<(VarId, VarId), f64>,
    frozen: BTreeMap<VarId, Spin>,
}

fn pair_key(i: VarId, j: VarId) -> (VarId, VarId) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl IsingProblem {
    /// An empty objective over `n_total` variables, all active.
    pub fn new(n_total: usize) -> Self {
        IsingProblem {
            n_total,
            u: 0.0,
            v: BTreeMap::new(),
            w: BTreeMap::new(),
            frozen: BTreeMap::new(),
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn offset(&self) -> f64 {
        self.u
    }

    pub fn set_offset(&mut self, u: f64) {
        self.u = u;
    }

    fn check_active(&self, id: VarId) -> Result<()> {
        if id >= self.n_total {
            return Err(Error::VariableOutOfRange { id, n: self.n_total });
        }
        if self.frozen.contains_key(&id) {
            return Err(Error::NotActive(id));
        }
        Ok(())
    }

    /// Adds `val` to `v_id`.
    pub fn add_linear(&mut self, id: VarId, val: f64) -> Result<()> {
        self.check_active(id)?;
        let entry = self.v.entry(id).or_insert(0.0);
        *entry += val;
        if *entry == 0.0 {
            self.v.remove(&id);
        }
        Ok(())
    }

    /// Adds `val` to `w_ij`. Repeated insertions of the same unordered pair
    /// accumulate, and a pair whose total reaches zero is dropped.
    pub fn add_coupling(&mut self, i: VarId, j: VarId, val: f64) -> Result<()> {
        if i == j {
            return Err(Error::SelfCoupling(i));
        }
        self.check_active(i)?;
        self.check_active(j)?;
        let key = pair_key(i, j);
        let entry = self.w.entry(key).or_insert(0.0);
        *entry += val;
        if *entry == 0.0 {
            self.w.remove(&key);
        }
        Ok(())
    }

    pub fn linear(&self, id: VarId) -> f64 {
        self.v.get(&id).copied().unwrap_or(0.0)
    }

    pub fn coupling(&self, i: VarId, j: VarId) -> f64 {
        self.w.get(&pair_key(i, j)).copied().unwrap_or(0.0)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.v.iter().map(|(&i, &x)| (i, x))
    }

    /// Couplings as `(i, j, w_ij)` with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = (VarId, VarId, f64)> + '_ {
        self.w.iter().map(|(&(i, j), &x)| (i, j, x))
    }

    pub fn n_couplings(&self) -> usize {
        self.w.len()
    }

    pub fn frozen(&self) -> &BTreeMap<VarId, Spin> {
        &self.frozen
    }

    pub fn is_active(&self, id: VarId) -> bool {
        id < self.n_total && !self.frozen.contains_key(&id)
    }

    /// Active ids in increasing order.
    pub fn active(&self) -> Vec<VarId> {
        (0..self.n_total).filter(|i| !self.frozen.contains_key(i)).collect()
    }

    pub fn n_active(&self) -> usize {
        self.n_total - self.frozen.len()
    }

    /// Evaluates the objective on the active variables of `b`. Bits of frozen
    /// variables are ignored since the offset already carries them.
    pub fn evaluate_cost(&self, b: &BitString) -> Result<f64> {
        if b.len() != self.n_total {
            return Err(Error::Dimension {
                expected: self.n_total,
                found: b.len(),
            });
        }
        let mut c = self.u;
        for (&i, &x) in &self.v {
            c += x * b.z(i);
        }
        for (&(i, j), &x) in &self.w {
            c += x * b.z(i) * b.z(j);
        }
        Ok(c)
    }

    /// Returns the reduced problem with `k` fixed to `sigma`. The receiver is
    /// left untouched.
    pub fn freeze_variable(&self, k: VarId, sigma: Spin) -> Result<IsingProblem> {
        self.check_active(k)?;
        let s = sigma.value();
        let mut out = self.clone();
        let touching: Vec<(VarId, VarId)> = out
            .w
            .keys()
            .filter(|&&(i, j)| i == k || j == k)
            .copied()
            .collect();
        for key in touching {
            let x = out.w.remove(&key).expect("key was just listed");
            let other = if key.0 == k { key.1 } else { key.0 };
            let entry = out.v.entry(other).or_insert(0.0);
            *entry += x * s;
            if *entry == 0.0 {
                out.v.remove(&other);
            }
        }
        if let Some(x) = out.v.remove(&k) {
            out.u += x * s;
        }
        out.frozen.insert(k, sigma);
        Ok(out)
    }

    /// Copies the frozen spins into `b`.
    pub fn fill_frozen(&self, b: &mut BitString) {
        for (&i, &s) in &self.frozen {
            b.set_spin(i, s);
        }
    }

    /// The same problem with every coefficient (including `u`) negated.
    pub fn negated(&self) -> IsingProblem {
        let mut out = self.clone();
        out.u = -out.u;
        out.v.values_mut().for_each(|x| *x = -*x);
        out.w.values_mut().for_each(|x| *x = -*x);
        out
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.w.values().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Dense copy of the active part, indexed by position in `active()`.
    pub fn dense(&self) -> DenseProblem {
        let ids = self.active();
        let n = ids.len();
        let mut pos = vec![usize::MAX; self.n_total];
        for (p, &id) in ids.iter().enumerate() {
            pos[id] = p;
        }
        let mut v = vec![0.0; n];
        for (&i, &x) in &self.v {
            v[pos[i]] = x;
        }
        let mut w = vec![0.0; n * n];
        for (&(i, j), &x) in &self.w {
            let (a, b) = (pos[i], pos[j]);
            w[a * n + b] = x;
            w[b * n + a] = x;
        }
        DenseProblem { ids, u: self.u, v, w }
    }
}

/// Active variables of a problem laid out densely. `w` is the symmetric
/// `n x n` coupling matrix in row-major order with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseProblem {
    pub ids: Vec<VarId>,
    pub u: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl DenseProblem {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn w(&self, a: usize, b: usize) -> f64 {
        self.w[a * self.n() + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        let n = self.n();
        &self.w[a * n..(a + 1) * n]
    }

    /// Cost for spins given per dense position.
    pub fn cost_spins(&self, z: &[f64]) -> f64 {
        let n = self.n();
        let mut c = self.u;
        for a in 0..n {
            let row = self.row(a);
            let mut acc = self.v[a];
            for b in a + 1..n {
                acc += row[b] * z[b];
            }
            c += acc * z[a];
        }
        c
    }

    /// Cost of the assignment whose bit `a` is bit `a` of `index`.
    pub fn cost_index(&self, index: u64) -> f64 {
        let z: Vec<f64> = (0..self.n())
            .map(|a| if (index >> a) & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        self.cost_spins(&z)
    }

    pub fn has_linear_terms(&self) -> bool {
        self.v.iter().any(|&x| x != 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::generate::gen_sk;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> IsingProblem {
        let mut p = IsingProblem::new(3);
        p.add_coupling(0, 1, 1.0).unwrap();
        p.add_coupling(0, 2, 1.0).unwrap();
        p.add_coupling(1, 2, 1.0).unwrap();
        p
    }

    fn random_problem(n: usize, seed: u64) -> IsingProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = IsingProblem::new(n);
        p.set_offset(rng.gen_range(-1.0..1.0));
        for i in 0..n {
            p.add_linear(i, rng.gen_range(-1.0..1.0)).unwrap();
            for j in i + 1..n {
                if rng.gen_bool(0.7) {
                    p.add_coupling(i, j, rng.gen_range(-1.0..1.0)).unwrap();
                }
            }
        }
        p
    }

    fn naive_cost(p: &IsingProblem, b: &BitString) -> f64 {
        let n = p.n_total();
        let mut c = p.offset();
        for i in 0..n {
            if p.is_active(i) {
                c += p.linear(i) * b.z(i);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i < j && p.is_active(i) && p.is_active(j) {
                    c += p.coupling(i, j) * b.z(i) * b.z(j);
                }
            }
        }
        c
    }

    #[test]
    fn triangle_all_plus() {
        assert_eq!(triangle().evaluate_cost(&BitString::zeros(3)).unwrap(), 3.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            triangle().evaluate_cost(&BitString::zeros(2)),
            Err(Error::Dimension { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn coupling_bookkeeping() {
        let mut p = IsingProblem::new(3);
        assert!(matches!(p.add_coupling(1, 1, 1.0), Err(Error::SelfCoupling(1))));
        assert!(p.add_coupling(0, 3, 1.0).is_err());
        p.add_coupling(2, 0, 1.5).unwrap();
        p.add_coupling(0, 2, 0.5).unwrap();
        assert_eq!(p.coupling(0, 2), 2.0);
        p.add_coupling(0, 2, -2.0).unwrap();
        assert_eq!(p.n_couplings(), 0);
    }

    #[test]
    fn sk_matches_double_loop() {
        let p = gen_sk(10, 17).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let b = BitString::from_index(rng.gen_range(0..1024), 10);
            assert_eq!(p.evaluate_cost(&b).unwrap(), naive_cost(&p, &b));
        }
    }

    #[test]
    fn freeze_pair() {
        let mut p = IsingProblem::new(2);
        p.add_coupling(0, 1, 1.0).unwrap();
        let q = p.freeze_variable(1, Spin::Minus).unwrap();
        assert_eq!(q.linear(0), -1.0);
        assert_eq!(q.offset(), 0.0);
        assert_eq!(q.n_active(), 1);
        assert_eq!(p.n_active(), 2);
        assert!(matches!(q.freeze_variable(1, Spin::Plus), Err(Error::NotActive(1))));
    }

    #[test]
    fn freeze_substitution() {
        let mut p = IsingProblem::new(3);
        p.add_linear(2, 2.0).unwrap();
        p.add_coupling(0, 2, -1.0).unwrap();
        p.add_coupling(1, 2, 1.0).unwrap();
        let q = p.freeze_variable(2, Spin::Plus).unwrap();
        assert_eq!(q.offset(), 2.0);
        assert_eq!(q.linear(0), -1.0);
        assert_eq!(q.linear(1), 1.0);
        assert_eq!(q.active(), vec![0, 1]);
    }

    #[test]
    fn dense_agrees_with_sparse() {
        let p = random_problem(7, 3).freeze_variable(4, Spin::Minus).unwrap();
        let d = p.dense();
        for index in 0..64u64 {
            let mut b = BitString::zeros(7);
            for (a, &id) in d.ids.iter().enumerate() {
                b.set(id, ((index >> a) & 1) as u8);
            }
            let want = p.evaluate_cost(&b).unwrap();
            assert!((d.cost_index(index) - want).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn freeze_consistency(seed in 0u64..1000, k in 0usize..10, minus in any::<bool>()) {
            let p = random_problem(10, seed);
            let sigma = if minus { Spin::Minus } else { Spin::Plus };
            let q = p.freeze_variable(k, sigma).unwrap();
            prop_assert!(q.couplings().all(|(i, j, _)| i != k && j != k));
            prop_assert_eq!(q.linear(k), 0.0);
            for index in 0..(1u64 << 10) {
                let mut b = BitString::from_index(index, 10);
                b.set_spin(k, sigma);
                let reduced = q.evaluate_cost(&b).unwrap();
                let original = p.evaluate_cost(&b).unwrap();
                prop_assert!((reduced - original).abs() < 1e-12);
            }
        }

        #[test]
        fn negation_negates_cost(seed in 0u64..1000, index in 0u64..256) {
            let p = random_problem(8, seed);
            let b = BitString::from_index(index, 8);
            let c = p.evaluate_cost(&b).unwrap();
            prop_assert_eq!(p.negated().evaluate_cost(&b).unwrap(), -c);
        }
    }
}
