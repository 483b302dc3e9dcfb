//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are small-to-moderate (M up to a few hundred antennas) and dense,
//! so everything here is a plain row-major `Vec<Complex64>` with no attempt at
//! blocking or SIMD.

mod eigen;
mod haar;
mod quadrature;

pub use eigen::{hermitian_eig, HermitianEigen, EIG_MAX_SWEEPS, EIG_TOLERANCE};
pub use haar::{complex_gaussian, haar_unitary};
pub use quadrature::{gauss_legendre, integrate, integrate_with_panel, DEFAULT_PANEL_WIDTH};

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the Hermitian check: `max |A_ij - conj(A_ji)| <= tol * max |A|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// A dense complex column vector. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("vector must have at least one entry".into()));
        }
        if let Some(i) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("vector entry {i}")));
        }
        Ok(ComplexVector(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        ComplexVector(entries)
    }

    pub fn ones(len: usize) -> Self {
        ComplexVector(vec![Complex64::new(1.0, 0.0); len.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    /// `self^H other`.
    pub fn dot(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        Ok(dot(&self.0, &other.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * factor).collect())
    }

    /// Outer product `self other^H`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), other.len(), |i, j| self.0[i] * other.0[j].conj())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Conjugated inner product `a^H b` over slices of equal length.
#[inline]
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Entrywise (Hadamard) product.
pub fn hadamard(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    if a.len() != b.len() {
        return Err(Error::dims(a.len(), b.len()));
    }
    Ok(ComplexVector(a.0.iter().zip(&b.0).map(|(x, y)| x * y).collect()))
}

/// A dense row-major complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("matrix entry ({}, {})", i / cols, i % cols)));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// The all-ones `rows x cols` matrix.
    pub fn ones(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(1.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Result<Complex64> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                format!("{} rows", self.cols),
                format!("{} rows", other.rows),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^H other` without materializing the adjoint.
    pub fn adjoint_matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows {
            return Err(Error::dims(
                format!("{} rows", self.rows),
                format!("{} rows", other.rows),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b_row = other.row(k);
            for (i, a) in self.row(k).iter().enumerate() {
                let a = a.conj();
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != x.len() {
            return Err(Error::dims(self.cols, x.len()));
        }
        Ok(ComplexVector(
            (0..self.rows).map(|i| self.row(i).iter().zip(&x.0).map(|(a, b)| a * b).sum()).collect(),
        ))
    }

    /// `self^H x`.
    pub fn adjoint_matvec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.rows != x.len() {
            return Err(Error::dims(self.rows, x.len()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (i, xi) in x.0.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        Ok(ComplexVector(out))
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_asymmetry() <= HERMITIAN_TOLERANCE * self.max_abs()
    }

    /// `max |(U^H U - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        match self.adjoint_matmul(self) {
            Ok(gram) => {
                let mut worst: f64 = 0.0;
                for i in 0..gram.rows {
                    for j in 0..gram.cols {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((gram[(i, j)] - target).norm());
                    }
                }
                worst
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::dims(
                "square matrix".to_string(),
                format!("{}x{}", self.rows, self.cols),
            ))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `tr(a b)` in O(M^2) as `sum_ij a_ij b_ji`, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.require_square()?;
    b.require_square()?;
    if a.rows() != b.rows() {
        return Err(Error::dims(
            format!("{0}x{0}", a.rows()),
            format!("{0}x{0}", b.rows()),
        ));
    }
    let n = a.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vector(n: usize, rng: &mut impl Rng) -> ComplexVector {
        ComplexVector::new((0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            .unwrap()
    }

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn hadamard_basic() {
        let a = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
        let b = ComplexVector::from_real(&[3.0, 4.0]).unwrap();
        assert_eq!(hadamard(&a, &b).unwrap(), ComplexVector::from_real(&[3.0, 8.0]).unwrap());
        assert_eq!(hadamard(&a, &ComplexVector::ones(2)).unwrap(), a);
    }

    #[test]
    fn hadamard_length_mismatch() {
        let a = ComplexVector::ones(2);
        let b = ComplexVector::ones(3);
        assert!(matches!(hadamard(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hadamard_outer_product_identity() {
        // (a ⊙ b)(c ⊙ d)^H = (a c^H) ⊙ (b d^H)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, b, cv, d) = (
            random_vector(4, &mut rng),
            random_vector(4, &mut rng),
            random_vector(4, &mut rng),
            random_vector(4, &mut rng),
        );
        let lhs = hadamard(&a, &b).unwrap().outer(&hadamard(&cv, &d).unwrap());
        let ac = a.outer(&cv);
        let bd = b.outer(&d);
        for i in 0..4 {
            for j in 0..4 {
                assert!((lhs[(i, j)] - ac[(i, j)] * bd[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn vector_rejects_non_finite_and_empty() {
        assert!(ComplexVector::new(vec![]).is_err());
        assert!(matches!(ComplexVector::new(vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite(_))));
        assert!(ComplexMatrix::new(1, 1, vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn trace_product_small_cases() {
        let m = 7;
        let i = ComplexMatrix::identity(m);
        assert_eq!(trace_product(&i, &i).unwrap(), c(m as f64, 0.0));
        let ones = ComplexMatrix::ones(m, m);
        assert_eq!(trace_product(&ones, &ones).unwrap(), c((m * m) as f64, 0.0));
        assert!(trace_product(&i, &ComplexMatrix::identity(3)).is_err());
        assert!(trace_product(&ComplexMatrix::ones(2, 3), &ComplexMatrix::ones(3, 2)).is_err());
    }

    #[test]
    fn trace_product_is_cyclic_and_matches_explicit_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_matrix(8, &mut rng);
            let b = random_matrix(8, &mut rng);
            let ab = trace_product(&a, &b).unwrap();
            let ba = trace_product(&b, &a).unwrap();
            let explicit = a.matmul(&b).unwrap().trace().unwrap();
            assert!((ab - ba).norm() <= 1e-12 * ab.norm().max(1.0));
            assert!((ab - explicit).norm() <= 1e-12 * explicit.norm().max(1.0));
        }
    }

    #[test]
    fn adjoint_products_agree_with_explicit_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(5, &mut rng);
        let b = random_matrix(5, &mut rng);
        let x = random_vector(5, &mut rng);
        let lhs = a.adjoint_matmul(&b).unwrap();
        let rhs = a.adjoint().matmul(&b).unwrap();
        assert!(lhs.as_slice().iter().zip(rhs.as_slice()).all(|(p, q)| (p - q).norm() < 1e-14));
        let lhs = a.adjoint_matvec(&x).unwrap();
        let rhs = a.adjoint().matvec(&x).unwrap();
        assert!(lhs.iter().zip(rhs.iter()).all(|(p, q)| (p - q).norm() < 1e-14));
    }

    #[test]
    fn hermitian_detection() {
        let mut h = ComplexMatrix::identity(3);
        h[(0, 1)] = c(0.5, 0.25);
        h[(1, 0)] = c(0.5, -0.25);
        assert!(h.is_hermitian());
        h[(1, 0)] = c(0.5, 0.25);
        assert!(!h.is_hermitian());
        assert!(!ComplexMatrix::ones(2, 3).is_hermitian());
    }
}
