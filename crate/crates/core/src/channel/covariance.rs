use std::sync::OnceLock;

use num_complex::Complex64;

use super::{normalize_coupling, UNITARY_TOLERANCE};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix, HermitianEigen};

/// Eigenvalues down to `-PSD_CLIP_TOLERANCE * lambda_max` are treated as
/// rounding noise and clipped to zero; anything more negative is an error.
pub const PSD_CLIP_TOLERANCE: f64 = 1e-10;

/// A Hermitian spatial covariance matrix with a lazily computed eigendecomposition.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    q: ComplexMatrix,
    eig: OnceLock<HermitianEigen>,
}

impl CovarianceMatrix {
    /// Wraps a Hermitian matrix. Positive semidefiniteness is checked on
    /// demand by [`CovarianceMatrix::psd_eigenvalues`].
    pub fn new(q: ComplexMatrix) -> Result<Self> {
        q.require_square()?;
        if !q.is_hermitian() {
            return Err(Error::NotHermitian {
                asymmetry: q.hermitian_asymmetry(),
            });
        }
        Ok(CovarianceMatrix {
            q,
            eig: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.q[(i, i)].re).sum()
    }

    /// True when `tr(Q) = M` within 1e-9 relative.
    pub fn is_normalized(&self) -> bool {
        let m = self.dim() as f64;
        (self.trace() - m).abs() <= super::NORMALIZATION_TOLERANCE * m
    }

    /// Eigendecomposition with eigenvalues sorted descending.
    pub fn eigen(&self) -> Result<&HermitianEigen> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = hermitian_eig(&self.q)?;
        Ok(self.eig.get_or_init(|| e))
    }

    /// Eigenvalues (descending) after the clipping rule. Fails with
    /// [`Error::NotPositiveSemidefinite`] when an eigenvalue is more negative
    /// than the clip tolerance allows.
    pub fn psd_eigenvalues(&self) -> Result<Vec<f64>> {
        let values = &self.eigen()?.values;
        clip_eigenvalues(values)
    }
}

pub(crate) fn clip_eigenvalues(values: &[f64]) -> Result<Vec<f64>> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    values
        .iter()
        .map(|&l| {
            if l >= 0.0 {
                Ok(l)
            } else if l >= -PSD_CLIP_TOLERANCE * top {
                Ok(0.0)
            } else {
                Err(Error::NotPositiveSemidefinite { eigenvalue: l })
            }
        })
        .collect()
}

/// `Q = U diag(omega) U^H`. The eigendecomposition is cached from the inputs.
pub fn build_covariance(u: &ComplexMatrix, omega: &[f64]) -> Result<CovarianceMatrix> {
    u.require_square()?;
    let m = u.rows();
    if omega.len() != m {
        return Err(Error::dims(format!("{m} coupling entries"), omega.len()));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "eigenbasis is not unitary (defect {defect:.3e})"
        )));
    }
    let omega = normalize_coupling(omega.to_vec())?;

    let mut q = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        let ui = u.row(i);
        let diag: f64 = ui.iter().zip(&omega).map(|(a, w)| a.norm_sqr() * w).sum();
        q[(i, i)] = Complex64::new(diag, 0.0);
        for j in (i + 1)..m {
            let z: Complex64 = ui
                .iter()
                .zip(u.row(j))
                .zip(&omega)
                .map(|((a, b), w)| a * b.conj() * *w)
                .sum();
            q[(i, j)] = z;
            q[(j, i)] = z.conj();
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| omega[b].total_cmp(&omega[a]));
    let eig = HermitianEigen {
        vectors: ComplexMatrix::from_fn(m, m, |i, j| u[(i, order[j])]),
        values: order.iter().map(|&k| omega[k]).collect(),
    };
    let cell = OnceLock::new();
    let _ = cell.set(eig);
    Ok(CovarianceMatrix { q, eig: cell })
}
