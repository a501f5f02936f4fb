//! Matrix-product-state simulation of shallow nearest-neighbour circuits.

mod sampler;
mod svd;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::circuit::{swap_matrix, to_dmatrix, unitarity_error, Circuit, Gate, GateMatrix};
use crate::error::{Error, Result};
use crate::ising::BitString;
use crate::samplers::STATEVECTOR_CAP;

pub use sampler::{run_truncated_qaoa_mps, MpsSampler, DEFAULT_CHI_MAX};

/// Singular values at or below this are treated as zero.
pub const SV_TOL: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-8;

/// What to do when a split needs more than `chi_max` singular values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Fail with [`Error::TruncationRefused`].
    #[default]
    Exact,
    /// Keep the largest `chi_max` values and record the discarded weight.
    Truncate,
}

/// Rank-3 site tensor `A[l, s, r]`, stored at `(l * 2 + s) * dr + r`.
#[derive(Clone, Debug, PartialEq)]
struct Site {
    dl: usize,
    dr: usize,
    data: Vec<C64>,
}

impl Site {
    fn at(&self, l: usize, s: usize, r: usize) -> C64 {
        self.data[(l * 2 + s) * self.dr + r]
    }

    /// `(dl * 2) x dr` view.
    fn left_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dl * 2, self.dr, &self.data)
    }

    /// `dl x (2 * dr)` view.
    fn right_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dl, 2 * self.dr, &self.data)
    }

    fn from_rows(dl: usize, dr: usize, m: &DMatrix<C64>) -> Site {
        let mut data = Vec::with_capacity(m.len());
        for row in m.row_iter() {
            data.extend(row.iter());
        }
        Site { dl, dr, data }
    }
}

/// An open-boundary MPS in mixed canonical form: sites left of `center` are
/// left-orthonormal and sites right of it right-orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsState {
    sites: Vec<Site>,
    center: usize,
    truncation_error: f64,
}

fn product_state(n: usize, local: [C64; 2]) -> MpsState {
    let site = Site {
        dl: 1,
        dr: 1,
        data: local.to_vec(),
    };
    MpsState {
        sites: vec![site; n],
        center: 0,
        truncation_error: 0.0,
    }
}

/// `|+>^n`.
pub fn mps_init_plus(n: usize) -> MpsState {
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    product_state(n, [a, a])
}

fn check_unitary(m: &GateMatrix) -> Result<()> {
    let err = unitarity_error(&to_dmatrix(m));
    if err > UNITARY_TOL {
        return Err(Error::NonUnitary(err));
    }
    Ok(())
}

impl MpsState {
    /// `|0>^n`.
    pub fn zeros(n: usize) -> Self {
        product_state(n, [C64::new(1.0, 0.0), C64::default()])
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Bond dimensions including the two boundary bonds of dimension 1.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.sites.iter().map(|s| s.dl).collect();
        d.push(self.sites.last().map_or(1, |s| s.dr));
        d
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Total squared weight discarded by truncating splits.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::VariableOutOfRange {
                id: site,
                n: self.n_sites(),
            });
        }
        Ok(())
    }

    fn shift_center_right(&mut self) {
        let c = self.center;
        let qr = self.sites[c].left_matrix().qr();
        let (q, r) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[c] = Site::from_rows(self.sites[c].dl, k, &q);
        let next = &self.sites[c + 1];
        let merged = r * next.right_matrix();
        self.sites[c + 1] = Site::from_rows(k, next.dr, &merged);
        self.center += 1;
    }

    fn shift_center_left(&mut self) {
        let c = self.center;
        let qr = self.sites[c].right_matrix().adjoint().qr();
        let (q, r) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[c] = Site::from_rows(k, self.sites[c].dr, &q.adjoint());
        let prev = &self.sites[c - 1];
        let merged = prev.left_matrix() * r.adjoint();
        self.sites[c - 1] = Site::from_rows(prev.dl, k, &merged);
        self.center -= 1;
    }

    fn move_center(&mut self, target: usize) {
        while self.center < target {
            self.shift_center_right();
        }
        while self.center > target {
            self.shift_center_left();
        }
    }

    pub fn apply_1q(&mut self, site: usize, m: &Matrix2<C64>) -> Result<()> {
        self.check_site(site)?;
        check_unitary(&GateMatrix::One(*m))?;
        let t = &mut self.sites[site];
        let dr = t.dr;
        for l in 0..t.dl {
            for r in 0..dr {
                let a0 = t.data[(l * 2) * dr + r];
                let a1 = t.data[(l * 2 + 1) * dr + r];
                t.data[(l * 2) * dr + r] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                t.data[(l * 2 + 1) * dr + r] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
        Ok(())
    }

    /// Applies `m` to sites `(site, site + 1)`, with `site` as the high bit of
    /// the matrix index, and splits the result by SVD.
    pub fn apply_2q_adjacent(
        &mut self,
        site: usize,
        m: &Matrix4<C64>,
        chi_max: usize,
        mode: Truncation,
    ) -> Result<()> {
        self.check_site(site + 1)?;
        check_unitary(&GateMatrix::Two(*m))?;
        if chi_max == 0 {
            return Err(Error::InvalidParameter("chi_max must be positive".into()));
        }
        self.move_center(site);
        let (a, b) = (&self.sites[site], &self.sites[site + 1]);
        let (dl, dk, dr) = (a.dl, a.dr, b.dr);

        // theta[l, s1, s2, r] at ((l * 2 + s1) * 2 + s2) * dr + r
        let mut theta = vec![C64::default(); dl * 4 * dr];
        for l in 0..dl {
            for s1 in 0..2 {
                for k in 0..dk {
                    let x = a.at(l, s1, k);
                    if x == C64::default() {
                        continue;
                    }
                    for s2 in 0..2 {
                        let base = ((l * 2 + s1) * 2 + s2) * dr;
                        for r in 0..dr {
                            theta[base + r] += x * b.at(k, s2, r);
                        }
                    }
                }
            }
        }
        let mut split = DMatrix::<C64>::zeros(dl * 2, 2 * dr);
        for l in 0..dl {
            for t1 in 0..2 {
                for t2 in 0..2 {
                    for r in 0..dr {
                        let mut acc = C64::default();
                        for s in 0..4 {
                            let g = m[(t1 * 2 + t2, s)];
                            if g != C64::default() {
                                acc += g * theta[((l * 2 + s / 2) * 2 + s % 2) * dr + r];
                            }
                        }
                        split[(l * 2 + t1, t2 * dr + r)] = acc;
                    }
                }
            }
        }

        let svd::Svd { u, s: sv, v } = svd::svd(&split);
        let rank = sv.iter().filter(|&&x| x > SV_TOL).count().max(1);
        let mut keep = rank;
        if rank > chi_max {
            match mode {
                Truncation::Exact => {
                    return Err(Error::TruncationRefused {
                        required: rank,
                        chi_max,
                    })
                }
                Truncation::Truncate => keep = chi_max,
            }
        }
        let weight: f64 = sv[..keep].iter().map(|x| x * x).sum();
        let discarded: f64 = sv[keep..rank].iter().map(|x| x * x).sum();
        let scale = if discarded > 0.0 { 1.0 / weight.sqrt() } else { 1.0 };
        self.truncation_error += discarded;

        let left = u.columns(0, keep).into_owned();
        let mut right = v.columns(0, keep).adjoint();
        for (c, x) in sv[..keep].iter().enumerate() {
            right.row_mut(c).scale_mut(x * scale);
        }
        self.sites[site] = Site::from_rows(dl, keep, &left);
        self.sites[site + 1] = Site::from_rows(keep, dr, &right);
        self.center = site + 1;
        Ok(())
    }

    /// Runs a circuit whose two-qubit gates all act on neighbouring qubits.
    /// Consecutive two-qubit gates on the same pair are merged before the split.
    pub fn apply_circuit(&mut self, circuit: &Circuit, chi_max: usize, mode: Truncation) -> Result<()> {
        if circuit.n_qubits() != self.n_sites() {
            return Err(Error::Dimension {
                expected: self.n_sites(),
                found: circuit.n_qubits(),
            });
        }
        let mut pending: Option<(usize, Matrix4<C64>)> = None;
        for gate in circuit.gates() {
            match gate.matrix() {
                GateMatrix::One(m) => {
                    if let Some((s, p)) = pending.take() {
                        self.apply_2q_adjacent(s, &p, chi_max, mode)?;
                    }
                    self.apply_1q(gate.targets()[0], &m)?;
                }
                GateMatrix::Two(m) => {
                    let (site, m) = adjacent_form(gate, m)?;
                    pending = match pending.take() {
                        Some((s, p)) if s == site => Some((site, m * p)),
                        Some((s, p)) => {
                            self.apply_2q_adjacent(s, &p, chi_max, mode)?;
                            Some((site, m))
                        }
                        None => Some((site, m)),
                    };
                }
            }
        }
        if let Some((s, p)) = pending {
            self.apply_2q_adjacent(s, &p, chi_max, mode)?;
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut env = DMatrix::<C64>::identity(1, 1);
        for t in &self.sites {
            let mut next = DMatrix::<C64>::zeros(t.dr, t.dr);
            for s in 0..2 {
                let a = DMatrix::from_fn(t.dl, t.dr, |l, r| t.at(l, s, r));
                next += a.adjoint() * &env * a;
            }
            env = next;
        }
        env[(0, 0)].re
    }

    /// Dense amplitudes, with bit `q` of the index for site `q`.
    pub fn to_statevector(&self) -> Result<Vec<C64>> {
        let n = self.n_sites();
        if n > STATEVECTOR_CAP {
            return Err(Error::CapExceeded {
                what: "statevector qubits",
                size: n,
                cap: STATEVECTOR_CAP,
            });
        }
        // psi[idx * d + bond]
        let mut psi = vec![C64::new(1.0, 0.0)];
        for (q, t) in self.sites.iter().enumerate() {
            let dim = 1usize << q;
            let mut next = vec![C64::default(); 2 * dim * t.dr];
            for idx in 0..dim {
                for l in 0..t.dl {
                    let x = psi[idx * t.dl + l];
                    for s in 0..2 {
                        let out = (idx | (s << q)) * t.dr;
                        for r in 0..t.dr {
                            next[out + r] += x * t.at(l, s, r);
                        }
                    }
                }
            }
            psi = next;
        }
        Ok(psi)
    }

    /// `R_i = sum_s A_i^s R_{i+1} A_i^s^dagger`, for `i = 0..=n`.
    fn right_environments(&self) -> Vec<DMatrix<C64>> {
        let n = self.n_sites();
        let mut env = vec![DMatrix::<C64>::identity(1, 1); n + 1];
        for i in (0..n).rev() {
            let t = &self.sites[i];
            let mut e = DMatrix::<C64>::zeros(t.dl, t.dl);
            for s in 0..2 {
                let a = DMatrix::from_fn(t.dl, t.dr, |l, r| t.at(l, s, r));
                e += &a * &env[i + 1] * a.adjoint();
            }
            env[i] = e;
        }
        env
    }

    fn sample_one(&self, env: &[DMatrix<C64>], rng: &mut impl Rng) -> (Vec<u8>, f64) {
        let mut left = DMatrix::<C64>::identity(1, 1);
        let mut bits = Vec::with_capacity(self.n_sites());
        let mut prob = 1.0;
        for (i, t) in self.sites.iter().enumerate() {
            let mut branch = Vec::with_capacity(2);
            for s in 0..2 {
                let a = DMatrix::from_fn(t.dl, t.dr, |l, r| t.at(l, s, r));
                let v = &left * a;
                let p = (&v * &env[i + 1] * v.adjoint())[(0, 0)].re.max(0.0);
                branch.push((v, p));
            }
            let total = branch[0].1 + branch[1].1;
            let s = if rng.gen::<f64>() * total < branch[0].1 { 0 } else { 1 };
            let (v, p) = branch.swap_remove(s);
            prob *= p / total;
            left = v / C64::new(p.sqrt(), 0.0);
            bits.push(s as u8);
        }
        (bits, prob)
    }

    /// `m` independent strings over the sites, drawn left to right from the
    /// conditional distributions, each with its probability.
    pub fn sample_with_probabilities(&self, m: usize, rng: &mut impl Rng) -> Result<Vec<(BitString, f64)>> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let env = self.right_environments();
        (0..m)
            .map(|_| {
                let (bits, p) = self.sample_one(&env, rng);
                Ok((BitString::from_bits(bits)?, p))
            })
            .collect()
    }

    pub fn sample(&self, m: usize, rng: &mut impl Rng) -> Result<Vec<BitString>> {
        Ok(self
            .sample_with_probabilities(m, rng)?
            .into_iter()
            .map(|(b, _)| b)
            .collect())
    }
}

/// Rewrites a two-qubit gate as a matrix on `(site, site + 1)` with `site`
/// as the high bit.
fn adjacent_form(gate: &Gate, m: Matrix4<C64>) -> Result<(usize, Matrix4<C64>)> {
    let t = gate.targets();
    let (a, b) = (t[0], t[1]);
    if b == a + 1 {
        Ok((a, m))
    } else if a == b + 1 {
        let s = swap_matrix();
        Ok((b, s * m * s))
    } else {
        Err(Error::UnsupportedGate(format!(
            "{} on non-neighbouring qubits {a} and {b}",
            gate.name()
        )))
    }
}

/// Draws `m` strings from `state`.
pub fn mps_sample(state: &MpsState, m: usize, rng: &mut impl Rng) -> Result<Vec<BitString>> {
    state.sample(m, rng)
}
