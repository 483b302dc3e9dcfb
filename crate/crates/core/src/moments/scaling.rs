//! Growth-rate diagnostics for the quantities whose boundedness in `M`
//! decides whether hardening and favorable propagation hold.

use std::fmt;
use std::str::FromStr;

use crate::channel::UserChannelSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingMetric {
    /// `||omega_k||_inf`
    CouplingPeak,
    /// `max_i |v_k,i|^2` with `v_k = U_k^H h_los_k`
    LosProjectionPeak,
    /// `||omega_l omega_k^T||_max`
    CouplingProductPeak,
    /// `||U_k^H U_l||_max`
    BasisOverlapPeak,
    /// `||h_los_k^H U_l||_inf`
    CrossLosProjectionPeak,
    /// `|h_los_k^H h_los_l|`
    LosAlignment,
}

impl ScalingMetric {
    pub const ALL: [ScalingMetric; 6] = [
        Self::CouplingPeak,
        Self::LosProjectionPeak,
        Self::CouplingProductPeak,
        Self::BasisOverlapPeak,
        Self::CrossLosProjectionPeak,
        Self::LosAlignment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CouplingPeak => "coupling_peak",
            Self::LosProjectionPeak => "los_projection_peak",
            Self::CouplingProductPeak => "coupling_product_peak",
            Self::BasisOverlapPeak => "basis_overlap_peak",
            Self::CrossLosProjectionPeak => "cross_los_projection_peak",
            Self::LosAlignment => "los_alignment",
        }
    }

    /// Evaluates the metric for user `k` (and `l` for pairwise metrics).
    pub fn evaluate(self, k: &UserChannelSpec, l: &UserChannelSpec) -> Result<f64> {
        if k.antennas() != l.antennas() {
            return Err(Error::dims(k.antennas(), l.antennas()));
        }
        let peak = |xs: &[f64]| xs.iter().cloned().fold(0.0, f64::max);
        Ok(match self {
            Self::CouplingPeak => peak(k.coupling()),
            Self::LosProjectionPeak => k.los_in_eigenbasis().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max),
            Self::CouplingProductPeak => peak(l.coupling()) * peak(k.coupling()),
            Self::BasisOverlapPeak => k
                .eigenbasis()
                .adjoint_matmul(l.eigenbasis())?
                .max_abs(),
            Self::CrossLosProjectionPeak => l
                .eigenbasis()
                .adjoint_matvec(k.los())?
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
            Self::LosAlignment => k.los().dot(l.los())?.norm(),
        })
    }
}

impl fmt::Display for ScalingMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScalingMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scaling metric {s:?}")))
    }
}

/// A metric tabulated against `M` with its fitted growth exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingDiagnostic {
    pub metric: ScalingMetric,
    pub m_values: Vec<usize>,
    pub values: Vec<f64>,
    /// Least-squares slope of `ln(value)` against `ln(M)`; `None` when some
    /// value is not strictly positive. Reported, never asserted.
    pub exponent: Option<f64>,
}

/// Evaluates `metric` on user pairs of increasing size and fits `value ~ M^eps`.
///
/// The fit is only meaningful over a wide range of `M`; a decade or more is
/// recommended.
pub fn assess_scaling(
    metric: ScalingMetric,
    pairs: &[(UserChannelSpec, UserChannelSpec)],
) -> Result<ScalingDiagnostic> {
    let m_values: Vec<usize> = pairs.iter().map(|(k, _)| k.antennas()).collect();
    let values = pairs
        .iter()
        .map(|(k, l)| metric.evaluate(k, l))
        .collect::<Result<Vec<_>>>()?;
    let exponent = fit_exponent(&m_values, &values)?;
    Ok(ScalingDiagnostic {
        metric,
        m_values,
        values,
        exponent,
    })
}

/// Ordinary least-squares slope on log-log axes. Needs at least three
/// distinct `M`.
pub fn fit_exponent(m_values: &[usize], values: &[f64]) -> Result<Option<f64>> {
    if m_values.len() != values.len() {
        return Err(Error::dims(m_values.len(), values.len()));
    }
    let mut distinct = m_values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "scaling fit needs at least 3 distinct M values, got {}",
            distinct.len()
        )));
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Ok(None);
    }
    let xs: Vec<f64> = m_values.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(Some(sxy / sxx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ula_steering, CouplingScenario};
    use crate::numerics::ComplexMatrix;

    fn pair(m: usize, scenario: CouplingScenario) -> (UserChannelSpec, UserChannelSpec) {
        let s = UserChannelSpec::new(
            0.5,
            ComplexMatrix::identity(m),
            scenario.coupling(m).unwrap(),
            ula_steering(m, 1.0, 0.5).unwrap(),
        )
        .unwrap();
        (s.clone(), s)
    }

    #[test]
    fn exponent_of_power_laws() {
        let ms = [10, 20, 40, 80, 160];
        let v: Vec<f64> = ms.iter().map(|&m| 3.0 * (m as f64).powf(0.7)).collect();
        assert!((fit_exponent(&ms, &v).unwrap().unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(fit_exponent(&ms, &[1.0, 0.0, 1.0, 1.0, 1.0]).unwrap(), None);
        assert!(fit_exponent(&[4, 4, 8], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn coupling_scenarios_scale_as_expected() {
        let ms = [32, 64, 128, 256, 512];
        let flat: Vec<_> = ms.iter().map(|&m| pair(m, CouplingScenario::Uniform)).collect();
        let d = assess_scaling(ScalingMetric::CouplingPeak, &flat).unwrap();
        assert!(d.exponent.unwrap().abs() < 0.1);
        let single: Vec<_> = ms.iter().map(|&m| pair(m, CouplingScenario::Single)).collect();
        let d = assess_scaling(ScalingMetric::CouplingPeak, &single).unwrap();
        assert!((d.exponent.unwrap() - 1.0).abs() < 0.1);
    }

    #[test]
    fn identical_los_alignment_equals_m() {
        let ms = [8, 16, 32];
        let pairs: Vec<_> = ms.iter().map(|&m| pair(m, CouplingScenario::Uniform)).collect();
        let d = assess_scaling(ScalingMetric::LosAlignment, &pairs).unwrap();
        for (v, m) in d.values.iter().zip(ms) {
            assert!((v - m as f64).abs() <= 1e-12 * m as f64);
        }
        assert!((d.exponent.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in ScalingMetric::ALL {
            assert_eq!(m.name().parse::<ScalingMetric>().unwrap(), m);
        }
    }
}
