//! Seeded, parallel Monte Carlo estimates of the channel moments.
//!
//! Trials are split into `workers` contiguous batches. Batch `w` draws only
//! from [`rng_stream`]`(seed, w)` and the per-batch accumulators are merged
//! in batch order, so a fixed `(trials, seed, workers)` gives bit-identical
//! results however the thread pool schedules the batches.

mod stats;
mod stream;

pub use stats::RunningMoments;
pub use stream::{derive_seed, rng_stream};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{BasisKind, ChannelSampler, ChannelTemplate, UserChannelSpec};
use crate::error::{Error, Result};
use crate::moments::{fp_variance, hardening_variance};
use crate::numerics::dot;
use crate::sweep::SweepResult;

/// Tag mixed into sub-seeds that draw eigenbases.
const BASIS_TAG: u64 = 0xB5;
/// Tag mixed into sub-seeds that drive channel sampling.
const SAMPLE_TAG: u64 = 0x5A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Result<Self> {
        let cfg = McConfig { trials, seed, workers };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    /// Same trial count and workers under a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        McConfig { seed, ..*self }
    }

    /// Number of trials handled by batch `w`.
    fn batch(&self, w: usize) -> u64 {
        let workers = self.workers as u64;
        self.trials / workers + u64::from((w as u64) < self.trials % workers)
    }
}

/// A sample mean with its standard error `s / sqrt(trials)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub mean: T,
    pub std_error: f64,
    pub trials: u64,
}

impl McEstimate<f64> {
    fn from_moments(r: &RunningMoments) -> Self {
        McEstimate {
            mean: r.mean(),
            std_error: r.std_error(),
            trials: r.count(),
        }
    }

    /// The sample variance of the underlying draws, with its own standard error.
    fn variance_of(r: &RunningMoments) -> Self {
        McEstimate {
            mean: r.sample_variance(),
            std_error: r.variance_std_error(),
            trials: r.count(),
        }
    }

    /// `(mean - reference) / std_error`; zero when both the error and the
    /// difference vanish (deterministic channels), infinite when only the
    /// error does.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() <= 1e-9 * reference.abs().max(1.0) {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Runs `work(rng, batch_size, accumulators)` for every batch and merges the
/// `n_stats` accumulators in batch order.
fn run_batches<F>(cfg: &McConfig, n_stats: usize, work: F) -> Result<Vec<RunningMoments>>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [RunningMoments]) + Sync,
{
    cfg.validate()?;
    let parts: Vec<Vec<RunningMoments>> = (0..cfg.workers)
        .into_par_iter()
        .map(|w| {
            let mut acc = vec![RunningMoments::new(); n_stats];
            let mut rng = rng_stream(cfg.seed, w as u64);
            work(&mut rng, cfg.batch(w), &mut acc);
            acc
        })
        .collect();
    let mut total = vec![RunningMoments::new(); n_stats];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total)
}

/// Statistics of the channel gain `|h|^2` of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimates {
    /// `E|h|^2`
    pub m2: McEstimate<f64>,
    /// `E|h|^4`
    pub m4: McEstimate<f64>,
    /// Sample variance of `|h|^2`.
    pub variance: McEstimate<f64>,
}

pub fn estimate_gain_statistics(spec: &UserChannelSpec, cfg: &McConfig) -> Result<GainEstimates> {
    let sampler = ChannelSampler::new(spec);
    let m = spec.antennas();
    let acc = run_batches(cfg, 2, |rng, count, acc| {
        let mut z = vec![Complex64::default(); m];
        let mut h = vec![Complex64::default(); m];
        for _ in 0..count {
            sampler.sample_into(rng, &mut z, &mut h);
            let g: f64 = h.iter().map(|x| x.norm_sqr()).sum();
            acc[0].push(g);
            acc[1].push(g * g);
        }
    })?;
    Ok(GainEstimates {
        m2: McEstimate::from_moments(&acc[0]),
        m4: McEstimate::from_moments(&acc[1]),
        variance: McEstimate::variance_of(&acc[0]),
    })
}

/// Sample means of `|h|^2` and `|h|^4`.
pub fn estimate_gain_moments(spec: &UserChannelSpec, cfg: &McConfig) -> Result<(McEstimate<f64>, McEstimate<f64>)> {
    let g = estimate_gain_statistics(spec, cfg)?;
    Ok((g.m2, g.m4))
}

/// Joint statistics of two independent users, from one pass over the trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimates {
    /// `E|h_k|^2`
    pub gain2: McEstimate<f64>,
    /// `E|h_k|^4`
    pub gain4: McEstimate<f64>,
    /// `E|h_k^H h_l|^2`
    pub cross: McEstimate<f64>,
    /// Mean of `h_k^H h_l / M`.
    pub inner: McEstimate<Complex64>,
    /// Central sample variance of `h_k^H h_l / M`.
    pub inner_variance: f64,
}

pub fn estimate_pair_moments(k: &UserChannelSpec, l: &UserChannelSpec, cfg: &McConfig) -> Result<PairEstimates> {
    let m = k.antennas();
    if l.antennas() != m {
        return Err(Error::dims(m, l.antennas()));
    }
    let (sk, sl) = (ChannelSampler::new(k), ChannelSampler::new(l));
    let mf = m as f64;
    let acc = run_batches(cfg, 5, |rng, count, acc| {
        let mut z = vec![Complex64::default(); m];
        let mut hk = vec![Complex64::default(); m];
        let mut hl = vec![Complex64::default(); m];
        for _ in 0..count {
            sk.sample_into(rng, &mut z, &mut hk);
            sl.sample_into(rng, &mut z, &mut hl);
            let g: f64 = hk.iter().map(|x| x.norm_sqr()).sum();
            let ip = dot(&hk, &hl);
            acc[0].push(g);
            acc[1].push(g * g);
            acc[2].push(ip.norm_sqr());
            acc[3].push(ip.re / mf);
            acc[4].push(ip.im / mf);
        }
    })?;
    let inner_variance = acc[3].sample_variance() + acc[4].sample_variance();
    Ok(PairEstimates {
        gain2: McEstimate::from_moments(&acc[0]),
        gain4: McEstimate::from_moments(&acc[1]),
        cross: McEstimate::from_moments(&acc[2]),
        inner: McEstimate {
            mean: Complex64::new(acc[3].mean(), acc[4].mean()),
            std_error: (inner_variance / acc[3].count() as f64).sqrt(),
            trials: acc[3].count(),
        },
        inner_variance,
    })
}

/// Sample mean of `|h_k^H h_l|^2`.
pub fn estimate_cross_moment(k: &UserChannelSpec, l: &UserChannelSpec, cfg: &McConfig) -> Result<McEstimate<f64>> {
    Ok(estimate_pair_moments(k, l, cfg)?.cross)
}

fn push_mc_metadata(out: &mut SweepResult, cfg: &McConfig) -> Result<()> {
    out.push_metadata("seed", cfg.seed)?;
    out.push_metadata("trials", cfg.trials)?;
    out.push_metadata("workers", cfg.workers)
}

fn check_m_values(m_values: &[usize]) -> Result<()> {
    if m_values.is_empty() {
        return Err(Error::Config("M list is empty".into()));
    }
    if let Some(m) = m_values.iter().find(|&&m| m < 2) {
        return Err(Error::Config(format!("M must be at least 2, got {m}")));
    }
    Ok(())
}

/// `Var(|h|^2) / M^2` against `M`, averaged over `basis_draws` eigenbases.
///
/// Columns: `closed_form` (mean over draws), `closed_form_min`,
/// `closed_form_max`, `mc` (mean over draws of the sample variance) and
/// `mc_std_error`. Identity templates use a single draw.
pub fn hardening_trace(
    template: &ChannelTemplate,
    m_values: &[usize],
    cfg: &McConfig,
    basis_draws: usize,
) -> Result<SweepResult> {
    cfg.validate()?;
    check_m_values(m_values)?;
    if basis_draws == 0 {
        return Err(Error::Config("basis_draws must be positive".into()));
    }
    let draws = match template.basis {
        BasisKind::Identity => 1,
        BasisKind::Haar => basis_draws,
    };
    let n = m_values.len();
    let (mut cf, mut cf_min, mut cf_max) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut mc, mut mc_se) = (vec![0.0; n], vec![0.0; n]);
    for (i, &m) in m_values.iter().enumerate() {
        let m2 = (m * m) as f64;
        let (mut lo, mut hi, mut sum_cf, mut sum_mc, mut sum_se2) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0, 0.0);
        for draw in 0..draws {
            let tags = [m as u64, draw as u64];
            let mut basis_rng = rng_stream(derive_seed(cfg.seed, &[BASIS_TAG, tags[0], tags[1]]), 0);
            let spec = template.instantiate(m, &mut basis_rng)?;
            let closed = hardening_variance(&spec).variance;
            let est = estimate_gain_statistics(&spec, &cfg.with_seed(derive_seed(cfg.seed, &[SAMPLE_TAG, tags[0], tags[1]])))?;
            lo = lo.min(closed);
            hi = hi.max(closed);
            sum_cf += closed;
            sum_mc += est.variance.mean / m2;
            sum_se2 += (est.variance.std_error / m2).powi(2);
        }
        let d = draws as f64;
        cf[i] = sum_cf / d;
        cf_min[i] = lo;
        cf_max[i] = hi;
        mc[i] = sum_mc / d;
        mc_se[i] = sum_se2.sqrt() / d;
    }
    let mut out = SweepResult::new("m", m_values.iter().map(|&m| m as f64).collect())?;
    out.push_column("closed_form", cf)?;
    out.push_column("closed_form_min", cf_min)?;
    out.push_column("closed_form_max", cf_max)?;
    out.push_column("mc", mc)?;
    out.push_column("mc_std_error", mc_se)?;
    push_mc_metadata(&mut out, cfg)?;
    out.push_metadata("basis_draws", draws)?;
    Ok(out)
}

/// Statistics of `h_k^H h_l / M` against `M` for two independent users.
///
/// Columns: `closed_form` (`E|h_k^H h_l|^2 / M^2`), `mc_second_moment` and
/// its `mc_second_moment_std_error`, `mc_mean_re`, `mc_mean_im`,
/// `mc_mean_std_error` and `mc_variance` (central). Haar templates draw a
/// fresh, independent basis per user.
pub fn fp_trace(
    template_k: &ChannelTemplate,
    template_l: &ChannelTemplate,
    m_values: &[usize],
    cfg: &McConfig,
) -> Result<SweepResult> {
    cfg.validate()?;
    check_m_values(m_values)?;
    let n = m_values.len();
    let mut cols: [Vec<f64>; 7] = Default::default();
    for c in cols.iter_mut() {
        c.reserve(n);
    }
    for &m in m_values {
        let mut rng_k = rng_stream(derive_seed(cfg.seed, &[BASIS_TAG, m as u64, 0]), 0);
        let mut rng_l = rng_stream(derive_seed(cfg.seed, &[BASIS_TAG, m as u64, 1]), 0);
        let k = template_k.instantiate(m, &mut rng_k)?;
        let l = template_l.instantiate(m, &mut rng_l)?;
        let closed = fp_variance(&k, &l)?.variance;
        let est = estimate_pair_moments(&k, &l, &cfg.with_seed(derive_seed(cfg.seed, &[SAMPLE_TAG, m as u64])))?;
        let m2 = (m * m) as f64;
        let row = [
            closed,
            est.cross.mean / m2,
            est.cross.std_error / m2,
            est.inner.mean.re,
            est.inner.mean.im,
            est.inner.std_error,
            est.inner_variance,
        ];
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    let names = [
        "closed_form",
        "mc_second_moment",
        "mc_second_moment_std_error",
        "mc_mean_re",
        "mc_mean_im",
        "mc_mean_std_error",
        "mc_variance",
    ];
    let mut out = SweepResult::new("m", m_values.iter().map(|&m| m as f64).collect())?;
    for (name, c) in names.into_iter().zip(cols) {
        out.push_column(name, c)?;
    }
    push_mc_metadata(&mut out, cfg)?;
    Ok(out)
}
