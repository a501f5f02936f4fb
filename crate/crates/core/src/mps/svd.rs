use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

const MAX_SWEEPS: usize = 80;

/// `a = u * diag(s) * v^dagger`, singular values in descending order.
pub(super) struct Svd {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v: DMatrix<C64>,
}

/// One-sided Jacobi SVD. Columns of `a` are rotated pairwise until mutually
/// orthogonal, so small and exactly-zero singular values come out as
/// accurately as large ones.
pub(super) fn svd(a: &DMatrix<C64>) -> Svd {
    if a.ncols() > a.nrows() {
        let t = svd(&a.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::<C64>::zeros(m, n);
    let mut vs = DMatrix::<C64>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        if sigma > 0.0 {
            u.set_column(k, &(w.column(j) / C64::new(sigma, 0.0)));
        }
        vs.set_column(k, &v.column(j));
        s.push(sigma);
    }
    Svd { u, s, v: vs }
}

/// `x_q <- x_q * phase`, then a real Givens rotation of columns `p` and `q`.
fn rotate(x: &mut DMatrix<C64>, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    for r in 0..x.nrows() {
        let a = x[(r, p)];
        let b = x[(r, q)] * phase;
        x[(r, p)] = a * c - b * s;
        x[(r, q)] = a * s + b * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::rng_for;
    use proptest::prelude::{prop_assert, proptest};
    use rand::Rng;

    fn check(a: &DMatrix<C64>) -> f64 {
        let d = svd(a);
        let k = d.s.len();
        let sm = DMatrix::from_fn(k, k, |i, j| if i == j { C64::new(d.s[i], 0.0) } else { C64::default() });
        assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        (&d.u * sm * d.v.adjoint() - a).norm()
    }

    #[test]
    fn structured_rank_two() {
        // Conjugate-symmetric rows and two exact zero singular values.
        let x = C64::new(0.24, -0.19);
        let y = C64::new(0.15, 0.19);
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[x, y, x.conj(), y.conj(), x.conj(), -y.conj(), x, -y, x * 0.8, y * 0.8, x.conj() * 0.8, y.conj() * 0.8, -x.conj() * 0.8, y.conj() * 0.8, -x * 0.8, y * 0.8],
        );
        assert!(check(&a) < 1e-14);
    }

    proptest! {
        #[test]
        fn reconstructs(seed in 0u64..500, m in 1usize..12, n in 1usize..12, rank in 1usize..12) {
            let mut rng = rng_for(seed, 0);
            let mut g = |r, c| DMatrix::<C64>::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let a = g(m, rank) * g(rank, n);
            prop_assert!(check(&a) < 1e-12 * (1.0 + a.norm()));
        }
    }
}
