use crate::ising::{BitString, DenseProblem, VarId};

/// Sample bits stored column-wise, one `u64` word per 64 samples, so that
/// `sum_b Z_i` and `sum_b Z_i Z_j` reduce to popcounts.
#[derive(Clone, Debug)]
pub struct PackedSamples {
    m: usize,
    words: usize,
    cols: Vec<u64>,
}

impl PackedSamples {
    /// Packs the bits of the variables `ids` (in that order) from `samples`.
    pub fn new(samples: &[BitString], ids: &[VarId]) -> Self {
        let m = samples.len();
        let words = m.div_ceil(64);
        let mut cols = vec![0u64; ids.len() * words];
        for (s, b) in samples.iter().enumerate() {
            let (w, bit) = (s / 64, s % 64);
            for (a, &id) in ids.iter().enumerate() {
                cols[a * words + w] |= (b.bit(id) as u64) << bit;
            }
        }
        PackedSamples { m, words, cols }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        if self.words == 0 {
            0
        } else {
            self.cols.len() / self.words
        }
    }

    fn col(&self, a: usize) -> &[u64] {
        &self.cols[a * self.words..(a + 1) * self.words]
    }

    /// `sum_b Z_a`.
    pub fn z_sum(&self, a: usize) -> i64 {
        let ones: u32 = self.col(a).iter().map(|w| w.count_ones()).sum();
        self.m as i64 - 2 * ones as i64
    }

    /// `sum_b Z_a Z_c`.
    pub fn zz_sum(&self, a: usize, c: usize) -> i64 {
        let differ: u32 = self.col(a).iter().zip(self.col(c)).map(|(x, y)| (x ^ y).count_ones()).sum();
        self.m as i64 - 2 * differ as i64
    }

    /// Mean cost over the packed samples, for a problem whose dense ids match
    /// the packing order.
    pub fn mean_cost(&self, d: &DenseProblem) -> f64 {
        let n = d.n();
        let m = self.m as f64;
        let mut c = d.u;
        for a in 0..n {
            if d.v[a] != 0.0 {
                c += d.v[a] * self.z_sum(a) as f64 / m;
            }
            let row = d.row(a);
            for b in a + 1..n {
                if row[b] != 0.0 {
                    c += row[b] * self.zz_sum(a, b) as f64 / m;
                }
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::gen_portfolio;
    use crate::samplers::{rng_for, uniform_bitstrings};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn popcount_sums_match_direct(seed in 0u64..200, m in 1usize..200) {
            let (p, _) = gen_portfolio(9, seed, 0.6, 0.0).unwrap();
            let samples = uniform_bitstrings(9, m, &mut rng_for(seed, 7));
            let d = p.dense();
            let packed = PackedSamples::new(&samples, &d.ids);
            for a in 0..9 {
                let direct: f64 = samples.iter().map(|b| b.z(a)).sum();
                prop_assert_eq!(packed.z_sum(a) as f64, direct);
                for c in 0..9 {
                    let direct: f64 = samples.iter().map(|b| b.z(a) * b.z(c)).sum();
                    prop_assert_eq!(packed.zz_sum(a, c) as f64, direct);
                }
            }
            let direct = samples.iter().map(|b| p.evaluate_cost(b).unwrap()).sum::<f64>() / m as f64;
            prop_assert!((packed.mean_cost(&d) - direct).abs() < 1e-9);
        }
    }
}
