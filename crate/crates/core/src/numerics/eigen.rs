//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation. The composite
//! 2x2 unitary acting on columns `(p, q)` is
//!
//! ```text
//! G = [ c          s         ]
//!     [ -s e^{-ia}  c e^{-ia} ]     with a_pq = |a_pq| e^{ia}
//! ```
//!
//! and the iteration is `A <- G^H A G`, `V <- V G`.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Convergence threshold on `||offdiag(A)||_F / ||A||_F`.
pub const EIG_TOLERANCE: f64 = 1e-12;
pub const EIG_MAX_SWEEPS: usize = 100;

/// Eigendecomposition `Q = U diag(values) U^H` with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub vectors: ComplexMatrix,
    pub values: Vec<f64>,
}

impl HermitianEigen {
    /// Rebuilds `U diag(values) U^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * self.values[k] * u[(j, k)].conj())
                .sum()
        })
    }
}

pub fn hermitian_eig(q: &ComplexMatrix) -> Result<HermitianEigen> {
    q.require_square()?;
    let scale = q.max_abs();
    let asym = q.hermitian_asymmetry();
    if asym > super::HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian { asymmetry: asym });
    }

    let n = q.rows();
    // Symmetrize exactly so that rounding in the input cannot accumulate.
    let mut a: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = Complex64::new(q[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = 0.5 * (q[(i, j)] + q[(j, i)].conj());
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= EIG_TOLERANCE * total {
            break;
        }
        if sweeps == EIG_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: off / total,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for qi in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, qi);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the solver's order among ties.
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(HermitianEigen { vectors, values })
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // Skip pivots that are negligible against both diagonal entries.
    if abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -s * conj_phase;
    let g_qq = c * conj_phase;

    // A <- A G (columns p, q)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * g_pp + akq * g_qp;
        a[k * n + q] = akp * g_pq + akq * g_qq;
    }
    // A <- G^H A (rows p, q)
    let (c_pp, c_pq, c_qp, c_qq) = (g_pp.conj(), g_pq.conj(), g_qp.conj(), g_qq.conj());
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c_pp * apk + c_qp * aqk;
        a[q * n + k] = c_pq * apk + c_qq * aqk;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * g_pp + vkq * g_qp;
        v[k * n + q] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn max_residual(q: &ComplexMatrix, eig: &HermitianEigen) -> f64 {
        let r = eig.reconstruct();
        q.as_slice()
            .iter()
            .zip(r.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = hermitian_eig(&ComplexMatrix::identity(6)).unwrap();
        assert!(eig.values.iter().all(|&l| l == 1.0));
    }

    #[test]
    fn all_ones_is_rank_one() {
        let m = 9;
        let eig = hermitian_eig(&ComplexMatrix::ones(m, m)).unwrap();
        assert!((eig.values[0] - m as f64).abs() < 1e-12);
        assert!(eig.values[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 16, 40] {
            let q = random_hermitian(n, &mut rng);
            let eig = hermitian_eig(&q).unwrap();
            assert!(max_residual(&q, &eig) <= 1e-9 * q.max_abs(), "n = {n}");
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
            assert!(eig.vectors.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 2)] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(hermitian_eig(&ComplexMatrix::ones(2, 3)).is_err());
    }

    #[test]
    fn zero_matrix() {
        let eig = hermitian_eig(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(eig.values, vec![0.0; 4]);
    }

    #[test]
    fn purely_imaginary_offdiagonal() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] + 1.0).abs() < 1e-15);
        assert!(max_residual(&m, &eig) < 1e-15);
    }
}
