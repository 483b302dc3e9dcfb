use std::f64::consts::PI;

use num_complex::Complex64;

use super::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_panel, ComplexMatrix, DEFAULT_PANEL_WIDTH};

/// Largest phase excursion (radians) allowed across one quadrature panel.
const MAX_PANEL_PHASE: f64 = 24.0;

/// One-ring scattering geometry: scatterers spread uniformly over
/// `[nominal - spread, nominal + spread]` around a ULA with element spacing
/// `spacing` (in carrier wavelengths). Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneRingConfig {
    pub m: usize,
    pub spread: f64,
    pub nominal: f64,
    pub spacing: f64,
}

impl OneRingConfig {
    pub fn new(m: usize, spread: f64, nominal: f64, spacing: f64) -> Result<Self> {
        let cfg = OneRingConfig {
            m,
            spread,
            nominal,
            spacing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("one-ring model needs M >= 1".into()));
        }
        if !(self.spread > 0.0 && self.spread <= PI) {
            return Err(Error::InvalidArgument(format!(
                "angular spread must lie in (0, pi], got {}",
                self.spread
            )));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) || !self.nominal.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad one-ring geometry: spacing {}, nominal {}",
                self.spacing, self.nominal
            )));
        }
        Ok(())
    }
}

/// `[Q]_{ij} = 1/(2 spread) * integral over the spread of exp(-j 2 pi d (j - i) sin(phi))`.
///
/// The result is Hermitian Toeplitz, so only the `M` distinct lags are
/// integrated. Panels are narrowed for long lags so that each 64-node panel
/// sees a bounded number of oscillations.
pub fn one_ring_covariance(cfg: &OneRingConfig) -> Result<CovarianceMatrix> {
    cfg.validate()?;
    let m = cfg.m;
    let (lo, hi) = (cfg.nominal - cfg.spread, cfg.nominal + cfg.spread);
    let norm = 1.0 / (2.0 * cfg.spread);
    let mut lags = Vec::with_capacity(m);
    lags.push(Complex64::new(1.0, 0.0));
    for lag in 1..m {
        let freq = 2.0 * PI * cfg.spacing * lag as f64;
        let width = DEFAULT_PANEL_WIDTH.min(MAX_PANEL_PHASE / freq);
        let v = integrate_with_panel(|phi| Complex64::from_polar(1.0, -freq * phi.sin()), lo, hi, width)?;
        lags.push(v * norm);
    }
    let q = ComplexMatrix::from_fn(m, m, |i, j| {
        if j >= i {
            lags[j - i]
        } else {
            lags[i - j].conj()
        }
    });
    CovarianceMatrix::new(q)
}
