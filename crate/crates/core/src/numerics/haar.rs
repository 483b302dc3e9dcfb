use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// One CN(0, 1) draw: independent real and imaginary parts with variance 1/2 each.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws an `m x m` unitary matrix from the Haar measure.
///
/// A matrix of i.i.d. CN(0, 1) entries is factored as `A = QR` with
/// Householder reflections; the columns of `Q` are then rephased by
/// `R_ii / |R_ii|` so that the triangular factor has a positive diagonal,
/// which makes the factorization unique and the distribution of `Q` exactly
/// Haar.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("Haar unitary needs m >= 1".into()));
    }
    // Column-major working copy: work[j][i] = A_ij.
    let mut work: Vec<Vec<Complex64>> = (0..m)
        .map(|_| (0..m).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut r_diag = Vec::with_capacity(m);

    for k in 0..m {
        let x = &work[k][k..];
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = x.to_vec();
        v[0] -= alpha;
        let v_norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr > 0.0 {
            for col in work.iter_mut().skip(k) {
                apply_reflector(&v, v_norm_sqr, &mut col[k..]);
            }
        }
        r_diag.push(alpha);
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{m-1}, accumulated right to left on the identity.
    let mut q_cols: Vec<Vec<Complex64>> = (0..m)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    for k in (0..m).rev() {
        let v = &reflectors[k];
        let v_norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr == 0.0 {
            continue;
        }
        for col in q_cols.iter_mut() {
            apply_reflector(v, v_norm_sqr, &mut col[k..]);
        }
    }

    let phases: Vec<Complex64> = r_diag
        .iter()
        .map(|r| if r.norm() > 0.0 { r / r.norm() } else { Complex64::new(1.0, 0.0) })
        .collect();
    Ok(ComplexMatrix::from_fn(m, m, |i, j| q_cols[j][i] * phases[j]))
}

/// `x <- (I - 2 v v^H / |v|^2) x`
#[inline]
fn apply_reflector(v: &[Complex64], v_norm_sqr: f64, x: &mut [Complex64]) {
    let s: Complex64 = v.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
    let f = s * (2.0 / v_norm_sqr);
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_case_is_unit_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let u = haar_unitary(1, &mut rng).unwrap();
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(haar_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn large_draw_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(64, &mut rng).unwrap();
        assert!(u.unitarity_defect() <= 1e-10);
        let uu = u.matmul(&u.adjoint()).unwrap();
        for i in 0..64 {
            assert!((uu[(i, i)].re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_gaussian_has_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 200_000;
        let (mut p, mut re2) = (0.0, 0.0);
        for _ in 0..n {
            let z = complex_gaussian(&mut rng);
            p += z.norm_sqr();
            re2 += z.re * z.re;
        }
        assert!((p / n as f64 - 1.0).abs() < 0.01);
        assert!((re2 / n as f64 - 0.5).abs() < 0.01);
    }
}
