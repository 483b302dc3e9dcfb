//! The Weichselberger channel model for a single-antenna user seen by an
//! `M`-antenna base station:
//!
//! ```text
//! h = eta * h_los + gamma * U (sqrt(omega) ⊙ z),   z ~ CN(0, I_M)
//! ```
//!
//! with `eta = sqrt(K / (K + 1))`, `gamma = sqrt(1 / (K + 1))`, a unitary
//! eigenbasis `U`, a nonnegative coupling vector `omega` summing to `M` and a
//! line-of-sight response with `|h_los|^2 = M`. The random part has
//! covariance `Q = U diag(omega) U^H`.

mod covariance;
mod one_ring;
mod scenarios;
mod template;

pub use covariance::{build_covariance, CovarianceMatrix, PSD_CLIP_TOLERANCE};
pub use one_ring::{one_ring_covariance, OneRingConfig};
pub use scenarios::{
    block_covariance_scenario, coupling_scenario, ones_covariance, CouplingScenario,
};
pub use template::{BasisKind, ChannelTemplate};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, haar_unitary, ComplexMatrix, ComplexVector};

/// Tolerance on the unitarity of a user eigenbasis, `max |U^H U - I|`.
pub const UNITARY_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on `sum(omega) = M` and `|h_los|^2 = M`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Coupling vectors off by at most this relative amount are rescaled to sum to `M`.
pub const COUPLING_RESCALE_LIMIT: f64 = 1e-6;

/// Parameters of one user's channel.
#[derive(Debug, Clone)]
pub struct UserChannelSpec {
    k_factor: f64,
    eigenbasis: ComplexMatrix,
    coupling: Vec<f64>,
    los: ComplexVector,
}

impl UserChannelSpec {
    /// Validates and assembles a user spec.
    ///
    /// `k_factor` is linear (not dB) and may be `f64::INFINITY` for a pure
    /// line-of-sight channel. A coupling vector whose sum deviates from `M` by
    /// at most [`COUPLING_RESCALE_LIMIT`] (relative) is rescaled; larger
    /// deviations are rejected.
    pub fn new(
        k_factor: f64,
        eigenbasis: ComplexMatrix,
        coupling: Vec<f64>,
        los: ComplexVector,
    ) -> Result<Self> {
        if k_factor.is_nan() || k_factor < 0.0 {
            return Err(Error::InvalidArgument(format!("K-factor must be >= 0, got {k_factor}")));
        }
        let m = los.len();
        if !eigenbasis.is_square() || eigenbasis.rows() != m {
            return Err(Error::dims(
                format!("{m}x{m} eigenbasis"),
                format!("{}x{}", eigenbasis.rows(), eigenbasis.cols()),
            ));
        }
        if coupling.len() != m {
            return Err(Error::dims(format!("{m} coupling entries"), coupling.len()));
        }
        let defect = eigenbasis.unitarity_defect();
        if defect > UNITARY_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "eigenbasis is not unitary (defect {defect:.3e})"
            )));
        }
        let coupling = normalize_coupling(coupling)?;
        let los_power = los.norm_sqr();
        if (los_power - m as f64).abs() > NORMALIZATION_TOLERANCE * m as f64 {
            return Err(Error::InvalidArgument(format!(
                "line-of-sight power must equal M = {m}, got {los_power}"
            )));
        }
        Ok(UserChannelSpec {
            k_factor,
            eigenbasis,
            coupling,
            los,
        })
    }

    pub fn antennas(&self) -> usize {
        self.los.len()
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    /// `sqrt(K / (K + 1))`, equal to 1 for `K = inf`.
    pub fn eta(&self) -> f64 {
        if self.k_factor.is_infinite() {
            1.0
        } else {
            (self.k_factor / (self.k_factor + 1.0)).sqrt()
        }
    }

    /// `sqrt(1 / (K + 1))`, equal to 0 for `K = inf`.
    pub fn gamma(&self) -> f64 {
        if self.k_factor.is_infinite() {
            0.0
        } else {
            (1.0 / (self.k_factor + 1.0)).sqrt()
        }
    }

    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn coupling(&self) -> &[f64] {
        &self.coupling
    }

    pub fn los(&self) -> &ComplexVector {
        &self.los
    }

    /// Line-of-sight response in the eigenbasis, `v = U^H h_los`.
    pub fn los_in_eigenbasis(&self) -> ComplexVector {
        self.eigenbasis
            .adjoint_matvec(&self.los)
            .expect("dimensions validated at construction")
    }

    /// `Q = U diag(omega) U^H`.
    pub fn covariance(&self) -> CovarianceMatrix {
        build_covariance(&self.eigenbasis, &self.coupling)
            .expect("spec invariants imply a valid covariance")
    }

    /// Replaces the K-factor, keeping everything else.
    pub fn with_k_factor(&self, k_factor: f64) -> Result<Self> {
        if k_factor.is_nan() || k_factor < 0.0 {
            return Err(Error::InvalidArgument(format!("K-factor must be >= 0, got {k_factor}")));
        }
        Ok(UserChannelSpec {
            k_factor,
            ..self.clone()
        })
    }
}

pub(crate) fn normalize_coupling(mut coupling: Vec<f64>) -> Result<Vec<f64>> {
    let m = coupling.len() as f64;
    if let Some(bad) = coupling.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupling entries must be finite and nonnegative, got {bad}"
        )));
    }
    let sum: f64 = coupling.iter().sum();
    let rel = (sum - m).abs() / m;
    if rel > COUPLING_RESCALE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "coupling vector must sum to M = {m}, got {sum}"
        )));
    }
    if sum != m {
        let f = m / sum;
        coupling.iter_mut().for_each(|w| *w *= f);
    }
    Ok(coupling)
}

/// Precomputed `U diag(sqrt(omega))`, stored by column, for repeated sampling.
///
/// Columns with zero coupling are dropped, so rank-deficient users are cheap
/// to sample.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    m: usize,
    eta_los: Vec<Complex64>,
    gamma: f64,
    active: Vec<(usize, Vec<Complex64>)>,
}

impl ChannelSampler {
    pub fn new(spec: &UserChannelSpec) -> Self {
        let m = spec.antennas();
        let eta = spec.eta();
        let u = spec.eigenbasis();
        let active = spec
            .coupling()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, &w)| {
                let s = w.sqrt();
                (j, (0..m).map(|i| u[(i, j)] * s).collect())
            })
            .collect();
        ChannelSampler {
            m,
            eta_los: spec.los().iter().map(|z| z * eta).collect(),
            gamma: spec.gamma(),
            active,
        }
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    /// Writes one channel realization into `out` (length `M`).
    ///
    /// Exactly one CN(0, 1) value is drawn per antenna, including antennas
    /// whose coupling is zero, so the stream layout does not depend on `omega`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut [Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.m);
        out.copy_from_slice(&self.eta_los);
        if self.gamma == 0.0 {
            return;
        }
        for zi in z.iter_mut() {
            *zi = complex_gaussian(rng);
        }
        for (j, col) in &self.active {
            let c = z[*j] * self.gamma;
            for (o, u) in out.iter_mut().zip(col) {
                *o += u * c;
            }
        }
    }
}

/// Draws one channel vector `h = eta h_los + gamma U (sqrt(omega) ⊙ z)`.
pub fn sample_channel<R: Rng + ?Sized>(spec: &UserChannelSpec, rng: &mut R) -> ComplexVector {
    let sampler = ChannelSampler::new(spec);
    let m = spec.antennas();
    let mut z = vec![Complex64::new(0.0, 0.0); m];
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    sampler.sample_into(rng, &mut z, &mut out);
    ComplexVector::from_vec_unchecked(out)
}

/// Line-of-sight response of a uniform linear array: entry `i` (0-based) is
/// `exp(j 2 pi d i cos(phi))`.
pub fn ula_steering(m: usize, phi: f64, spacing: f64) -> Result<ComplexVector> {
    if m == 0 {
        return Err(Error::InvalidArgument("array needs at least one antenna".into()));
    }
    if !(spacing > 0.0 && spacing.is_finite()) || !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad steering parameters phi = {phi}, d = {spacing}"
        )));
    }
    let step = 2.0 * std::f64::consts::PI * spacing * phi.cos();
    Ok(ComplexVector::from_vec_unchecked(
        (0..m).map(|i| Complex64::from_polar(1.0, step * i as f64)).collect(),
    ))
}

/// A random user spec: Haar eigenbasis, flat-Dirichlet coupling scaled to sum
/// to `M`, and a ULA line-of-sight response at a uniform angle in `[0, pi]`.
pub fn random_spec<R: Rng + ?Sized>(
    m: usize,
    k_factor: f64,
    spacing: f64,
    rng: &mut R,
) -> Result<UserChannelSpec> {
    let eigenbasis = haar_unitary(m, rng)?;
    let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let coupling = raw.iter().map(|w| w * m as f64 / total).collect();
    let phi = rng.random_range(0.0..std::f64::consts::PI);
    UserChannelSpec::new(k_factor, eigenbasis, coupling, ula_steering(m, phi, spacing)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn iid_spec(m: usize, k: f64) -> UserChannelSpec {
        UserChannelSpec::new(
            k,
            ComplexMatrix::identity(m),
            vec![1.0; m],
            ula_steering(m, PI / 3.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn eta_gamma_partition_power() {
        for k in [0.0, 0.5, 1.0, 7.3, 1e6, f64::INFINITY] {
            let s = iid_spec(4, k);
            assert!((s.eta().powi(2) + s.gamma().powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let m = 4;
        let los = ula_steering(m, 0.3, 0.5).unwrap();
        let eye = ComplexMatrix::identity(m);
        assert!(UserChannelSpec::new(-1.0, eye.clone(), vec![1.0; m], los.clone()).is_err());
        assert!(UserChannelSpec::new(f64::NAN, eye.clone(), vec![1.0; m], los.clone()).is_err());
        assert!(UserChannelSpec::new(0.0, eye.clone(), vec![2.0, -1.0, 2.0, 1.0], los.clone()).is_err());
        assert!(UserChannelSpec::new(0.0, eye.clone(), vec![1.0; 3], los.clone()).is_err());
        assert!(UserChannelSpec::new(0.0, eye.clone(), vec![1.1; m], los.clone()).is_err());
        assert!(UserChannelSpec::new(0.0, ComplexMatrix::ones(m, m), vec![1.0; m], los.clone()).is_err());
        assert!(UserChannelSpec::new(0.0, eye.clone(), vec![1.0; m], los.scale(Complex64::new(2.0, 0.0))).is_err());
    }

    #[test]
    fn coupling_within_limit_is_rescaled() {
        let m = 4;
        let s = UserChannelSpec::new(
            0.0,
            ComplexMatrix::identity(m),
            vec![1.0 + 1e-7; m],
            ula_steering(m, 0.3, 0.5).unwrap(),
        )
        .unwrap();
        let sum: f64 = s.coupling().iter().sum();
        assert!((sum - 4.0).abs() < 1e-14);
    }

    #[test]
    fn ula_broadside_and_quarter_wave_cases() {
        let v = ula_steering(5, PI / 2.0, 0.5).unwrap();
        assert!(v.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let v = ula_steering(4, PI / 3.0, 0.5).unwrap();
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(ula_steering(0, 0.0, 0.5).is_err());
        assert!(ula_steering(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn pure_los_sample_is_exactly_los() {
        let s = iid_spec(8, f64::INFINITY);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = sample_channel(&s, &mut rng);
        assert_eq!(&h, s.los());
    }

    #[test]
    fn iid_rayleigh_power_is_m() {
        let m = 8;
        let s = iid_spec(m, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_channel(&s, &mut rng).norm_sqr() / m as f64).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn sample_covariance_matches_q() {
        let m = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = haar_unitary(m, &mut rng).unwrap();
        let s = UserChannelSpec::new(0.0, u, vec![2.2, 1.0, 0.6, 0.2], ula_steering(m, 0.4, 0.5).unwrap()).unwrap();
        let q = s.covariance();
        let n = 100_000;
        let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
        let mut acc2 = vec![0.0; m * m];
        for _ in 0..n {
            let h = sample_channel(&s, &mut rng);
            for i in 0..m {
                for j in 0..m {
                    let x = h[i] * h[j].conj();
                    acc[i * m + j] += x;
                    acc2[i * m + j] += x.norm_sqr();
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let mean = acc[i * m + j] / n as f64;
                let second = acc2[i * m + j] / n as f64;
                let se = ((second - mean.norm_sqr()).max(0.0) / n as f64).sqrt();
                let err = (mean - q.matrix()[(i, j)]).norm();
                assert!(err <= 5.0 * se, "({i},{j}): err {err} se {se}");
            }
        }
    }

    #[test]
    fn channel_mean_is_eta_los() {
        let m = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = random_spec(m, 2.0, 0.5, &mut rng).unwrap();
        let n = 100_000;
        let mut sum = vec![Complex64::new(0.0, 0.0); m];
        let mut sq = vec![0.0; m];
        for _ in 0..n {
            let h = sample_channel(&s, &mut rng);
            for i in 0..m {
                sum[i] += h[i];
                sq[i] += h[i].norm_sqr();
            }
        }
        for i in 0..m {
            let mean = sum[i] / n as f64;
            let se = ((sq[i] / n as f64 - mean.norm_sqr()) / n as f64).sqrt();
            assert!((mean - s.los()[i] * s.eta()).norm() <= 5.0 * se);
        }
    }
}
