use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::CouplingScenario;
use crate::error::{Error, Result};
use crate::montecarlo::McConfig;

/// Worker count used when neither the environment nor the config sets one.
pub const FALLBACK_WORKERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Hardening,
    BlockInterference,
    OneRingInterference,
    MomentValidate,
    ScalingDiagnostic,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        Self::Hardening,
        Self::BlockInterference,
        Self::OneRingInterference,
        Self::MomentValidate,
        Self::ScalingDiagnostic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hardening => "hardening",
            Self::BlockInterference => "block-interference",
            Self::OneRingInterference => "one-ring-interference",
            Self::MomentValidate => "moment-validate",
            Self::ScalingDiagnostic => "scaling-diagnostic",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            Error::Config(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// JSON has no infinity, so an infinite K-factor is written as `"inf"`.
mod k_factor_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(k: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match k {
            None => s.serialize_none(),
            Some(v) if v.is_infinite() && *v > 0.0 => s.serialize_str("inf"),
            Some(v) => s.serialize_f64(*v),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Num(v)) => Ok(Some(v)),
            Some(Raw::Text(t)) => super::parse_k_factor(&t).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses a linear K-factor; `inf` (any case) selects a pure line-of-sight channel.
pub fn parse_k_factor(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    t.parse().map_err(|_| Error::Config(format!("bad K-factor {s:?}")))
}

/// A fully resolved experiment description.
///
/// Angles `phi` and `phi0` are radians; spreads are degrees. Fields an
/// experiment does not use are carried along unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Antenna counts. Single-valued for block, one-ring and moment-validate.
    pub m: Vec<usize>,
    /// Rank parameters for the block study.
    pub d_rank: Vec<usize>,
    /// Linear Ricean K-factor. For moment-validate, `null` draws K uniformly
    /// from `[0, k_max]` per spec.
    #[serde(with = "k_factor_serde")]
    pub k_factor: Option<f64>,
    pub k_max: f64,
    /// LoS angle of the hardening user, radians.
    pub phi: f64,
    /// Nominal angles of the two one-ring users, and the LoS angles of the
    /// scaling-diagnostic pair, radians.
    pub phi0: [f64; 2],
    /// Antenna spacing in wavelengths.
    pub spacing: f64,
    pub spread1_deg: Vec<f64>,
    pub spread2_deg: Vec<f64>,
    /// Coupling scenarios (hardening, scaling) or block layouts (block).
    pub scenarios: Vec<u8>,
    /// Number of random spec pairs for moment-validate.
    pub specs: usize,
    pub basis_draws: usize,
    pub mc: McConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// A partially specified config, as read from a file or assembled from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<ExperimentId>,
    pub m: Option<Vec<usize>>,
    pub d_rank: Option<Vec<usize>>,
    #[serde(default, with = "k_factor_serde")]
    pub k_factor: Option<f64>,
    pub k_max: Option<f64>,
    pub phi: Option<f64>,
    pub phi0: Option<[f64; 2]>,
    pub spacing: Option<f64>,
    pub spread1_deg: Option<Vec<f64>>,
    pub spread2_deg: Option<Vec<f64>>,
    pub scenarios: Option<Vec<u8>>,
    pub specs: Option<usize>,
    pub basis_draws: Option<usize>,
    pub mc: Option<McOverrides>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOverrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))
    }
}

fn degrees(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|d| d as f64).collect()
}

impl ExperimentConfig {
    /// Built-in defaults for each experiment.
    pub fn defaults(experiment: ExperimentId) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            m: vec![16, 32, 64, 128, 256, 512],
            d_rank: (1..=99).collect(),
            k_factor: Some(0.5),
            k_max: 10.0,
            phi: PI / 3.0,
            phi0: [PI / 4.0, 3.0 * PI / 4.0],
            spacing: 0.5,
            spread1_deg: vec![1.0, 5.0, 10.0, 20.0, 40.0],
            spread2_deg: degrees(1, 90),
            scenarios: vec![1, 2, 3],
            specs: 50,
            basis_draws: 32,
            mc: McConfig {
                trials: 1000,
                seed: 1,
                workers: FALLBACK_WORKERS,
            },
            out: None,
        };
        match experiment {
            ExperimentId::Hardening => {}
            ExperimentId::BlockInterference => {
                cfg.m = vec![100];
                cfg.scenarios = vec![1, 2];
            }
            ExperimentId::OneRingInterference => cfg.m = vec![100],
            ExperimentId::MomentValidate => {
                cfg.m = vec![16];
                cfg.k_factor = None;
                cfg.mc.trials = 1_000_000;
            }
            ExperimentId::ScalingDiagnostic => cfg.m = vec![32, 64, 128, 256, 512],
        }
        cfg
    }

    /// Applies the set fields of `o` on top of `self`. Changing the
    /// experiment id is not allowed here; pick the defaults for it first.
    pub fn apply(&mut self, o: &ConfigOverrides) -> Result<()> {
        if let Some(e) = o.experiment {
            if e != self.experiment {
                return Err(Error::Config(format!(
                    "config is for experiment {e}, but {} was requested",
                    self.experiment
                )));
            }
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = &o.$f { self.$f = v.clone(); } )* };
        }
        set!(m, d_rank, k_max, phi, phi0, spacing, spread1_deg, spread2_deg, scenarios, specs, basis_draws);
        if o.k_factor.is_some() {
            self.k_factor = o.k_factor;
        }
        if let Some(mc) = &o.mc {
            if let Some(t) = mc.trials {
                self.mc.trials = t;
            }
            if let Some(s) = mc.seed {
                self.mc.seed = s;
            }
            if let Some(w) = mc.workers {
                self.mc.workers = w;
            }
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        Ok(())
    }

    /// Defaults for `experiment`, then each layer in order, then validation.
    pub fn resolve(experiment: ExperimentId, layers: &[&ConfigOverrides]) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        for layer in layers {
            cfg.apply(layer)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.mc.validate()?;
        if self.m.is_empty() {
            return bad("M list is empty; give at least one antenna count (e.g. --m 16,32,64)".into());
        }
        if let Some(m) = self.m.iter().find(|&&m| m < 2) {
            return bad(format!("M must be at least 2, got {m}"));
        }
        if let Some(k) = self.k_factor {
            if k.is_nan() || k < 0.0 {
                return bad(format!("K-factor must be >= 0 (linear scale), got {k}"));
            }
        }
        if !(self.k_max >= 0.0 && self.k_max.is_finite()) {
            return bad(format!("k_max must be finite and >= 0, got {}", self.k_max));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return bad(format!("antenna spacing must be positive, got {}", self.spacing));
        }
        if !self.phi.is_finite() || !self.phi0.iter().all(|p| p.is_finite()) {
            return bad("angles must be finite".into());
        }
        if self.basis_draws == 0 {
            return bad("basis_draws must be positive".into());
        }
        let single_m = || -> Result<usize> {
            match self.m.as_slice() {
                [m] => Ok(*m),
                _ => Err(Error::Config(format!(
                    "experiment {} takes a single M, got {} values",
                    self.experiment,
                    self.m.len()
                ))),
            }
        };
        let scenarios = |allowed: &[u8]| -> Result<()> {
            if self.scenarios.is_empty() {
                return Err(Error::Config("scenario list is empty".into()));
            }
            match self.scenarios.iter().find(|s| !allowed.contains(s)) {
                Some(s) => Err(Error::Config(format!("scenario {s} is not one of {allowed:?}"))),
                None => Ok(()),
            }
        };
        let spreads = |name: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() {
                return Err(Error::Config(format!("{name} list is empty")));
            }
            match v.iter().find(|s| !(**s > 0.0 && **s <= 180.0)) {
                Some(s) => Err(Error::Config(format!("{name} values must lie in (0, 180] degrees, got {s}"))),
                None => Ok(()),
            }
        };
        match self.experiment {
            ExperimentId::Hardening => {
                if self.k_factor.is_none() {
                    return bad("hardening needs a fixed K-factor".into());
                }
                scenarios(&[1, 2, 3])?;
            }
            ExperimentId::BlockInterference => {
                let m = single_m()?;
                scenarios(&[1, 2])?;
                if self.d_rank.is_empty() {
                    return bad("D list is empty".into());
                }
                if let Some(d) = self.d_rank.iter().find(|&&d| d < 1 || d > m - 1) {
                    return bad(format!("D = {d} is out of range; D must lie in [1, {}] for M = {m}", m - 1));
                }
            }
            ExperimentId::OneRingInterference => {
                single_m()?;
                spreads("spread1_deg", &self.spread1_deg)?;
                spreads("spread2_deg", &self.spread2_deg)?;
            }
            ExperimentId::MomentValidate => {
                single_m()?;
                if self.specs == 0 {
                    return bad("specs must be positive".into());
                }
            }
            ExperimentId::ScalingDiagnostic => {
                if self.k_factor.is_none() {
                    return bad("scaling-diagnostic needs a fixed K-factor".into());
                }
                scenarios(&[1, 2, 3])?;
                let mut distinct = self.m.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 {
                    return bad(format!("scaling fit needs at least 3 distinct M values, got {}", distinct.len()));
                }
                let (lo, hi) = (distinct[0], distinct[distinct.len() - 1]);
                if hi < 10 * lo {
                    return bad(format!("M values should span at least a decade, got {lo}..{hi}"));
                }
            }
        }
        Ok(())
    }

    pub fn coupling_scenarios(&self) -> Result<Vec<CouplingScenario>> {
        self.scenarios.iter().map(|&s| CouplingScenario::from_id(s)).collect()
    }

    /// Pretty canonical JSON; parsing it back yields an identical config.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Single-line JSON without the output path, used as the CSV config echo.
    pub fn echo(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        serde_json::to_string(&c).expect("config serializes")
    }

    pub fn from_canonical_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `1,2,8` and `lo:hi[:step]` items (inclusive, step defaults to 1),
/// which may be mixed: `16,32:64:16`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let num = |t: &str| -> Result<usize> {
        t.trim().parse().map_err(|_| Error::Config(format!("bad integer {t:?} in list {s:?}")))
    };
    let mut out = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [lo, hi] | [lo, hi, _] => {
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                let (lo, hi) = (num(lo)?, num(hi)?);
                if step == 0 || lo > hi {
                    return Err(Error::Config(format!("bad range {item:?}")));
                }
                out.extend((lo..=hi).step_by(step));
            }
            _ => return Err(Error::Config(format!("bad list item {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("empty list {s:?}")));
    }
    Ok(out)
}

/// Real-valued counterpart of [`parse_usize_list`].
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| Error::Config(format!("bad number {t:?} in list {s:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("non-finite value in list {s:?}")))
        }
    };
    let mut out = Vec::new();
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [lo, hi] | [lo, hi, _] => {
                let step = if parts.len() == 3 { num(parts[2])? } else { 1.0 };
                let (lo, hi) = (num(lo)?, num(hi)?);
                if !(step > 0.0) || lo > hi {
                    return Err(Error::Config(format!("bad range {item:?}")));
                }
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| lo + i as f64 * step));
            }
            _ => return Err(Error::Config(format!("bad list item {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("empty list {s:?}")));
    }
    Ok(out)
}
