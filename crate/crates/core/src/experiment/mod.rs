//! The five experiment sweeps, each turning a resolved
//! [`ExperimentConfig`] into a [`SweepResult`].

mod config;

pub use config::{
    parse_f64_list, parse_k_factor, parse_usize_list, ConfigOverrides, ExperimentConfig, ExperimentId, McOverrides,
    FALLBACK_WORKERS,
};

use rand::Rng;

use crate::channel::{
    block_covariance_scenario, one_ring_covariance, ones_covariance, random_spec, ula_steering, BasisKind,
    ChannelTemplate, CovarianceMatrix, OneRingConfig, UserChannelSpec,
};
use crate::error::{Error, Result};
use crate::moments::{assess_scaling, cross_moment, fourth_moment, second_moment, trace_interference, ScalingMetric};
use crate::montecarlo::{derive_seed, estimate_pair_moments, hardening_trace, rng_stream};
use crate::numerics::{haar_unitary, trace_product};
use crate::sweep::SweepResult;

const SPEC_TAG: u64 = 0x5bec;
const MC_TAG: u64 = 0x3c;
const BASIS_TAG: u64 = 0xba5e;

/// Metric codes used in the `metric` column of moment-validate output.
pub const METRIC_GAIN2: f64 = 1.0;
pub const METRIC_GAIN4: f64 = 2.0;
pub const METRIC_CROSS: f64 = 3.0;

/// Runs the configured experiment and stamps the result with the
/// experiment id, code version, seed and config echo.
pub fn run(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut out = match cfg.experiment {
        ExperimentId::Hardening => run_hardening(cfg)?,
        ExperimentId::BlockInterference => run_block_interference(cfg)?,
        ExperimentId::OneRingInterference => run_one_ring_interference(cfg)?,
        ExperimentId::MomentValidate => run_moment_validate(cfg)?,
        ExperimentId::ScalingDiagnostic => run_scaling_diagnostic(cfg)?,
    };
    out.push_metadata("experiment", cfg.experiment)?;
    out.push_metadata("version", env!("CARGO_PKG_VERSION"))?;
    out.push_metadata("seed", cfg.mc.seed)?;
    out.push_metadata("config", cfg.echo())?;
    Ok(out)
}

fn expect(cfg: &ExperimentConfig, id: ExperimentId) -> Result<()> {
    if cfg.experiment != id {
        return Err(Error::Config(format!("config is for {}, not {id}", cfg.experiment)));
    }
    cfg.validate()
}

fn axis_of(values: &[usize]) -> Vec<f64> {
    values.iter().map(|&v| v as f64).collect()
}

/// `Var(|h|^2) / M^2` against `M`: closed form and Monte Carlo per coupling
/// scenario, each averaged over `basis_draws` Haar eigenbases.
///
/// Columns are `s<id>_closed_form`, `s<id>_closed_form_min`,
/// `s<id>_closed_form_max`, `s<id>_mc` and `s<id>_mc_std_error`. All
/// scenarios share the seed, so they see the same bases and trials.
pub fn run_hardening(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect(cfg, ExperimentId::Hardening)?;
    let k_factor = cfg.k_factor.expect("validated");
    let mut out = SweepResult::new("m", axis_of(&cfg.m))?;
    for scenario in cfg.coupling_scenarios()? {
        let template = ChannelTemplate {
            k_factor,
            coupling: scenario,
            los_angle: cfg.phi,
            spacing: cfg.spacing,
            basis: BasisKind::Haar,
        };
        let trace = hardening_trace(&template, &cfg.m, &cfg.mc, cfg.basis_draws)?;
        for name in ["closed_form", "closed_form_min", "closed_form_max", "mc", "mc_std_error"] {
            let col = trace.column(name).expect("trace column").to_vec();
            out.push_column(format!("s{}_{name}", scenario.id()), col)?;
        }
    }
    out.push_metadata("basis_draws", cfg.basis_draws)?;
    out.push_metadata("trials", cfg.mc.trials)?;
    out.push_metadata("workers", cfg.mc.workers)?;
    Ok(out)
}

/// `tr(Q_1 1_M) / M^2` against the rank parameter `D`, one column `s<id>`
/// per block layout.
pub fn run_block_interference(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect(cfg, ExperimentId::BlockInterference)?;
    let m = cfg.m[0];
    let ones = ones_covariance(m);
    let m2 = (m * m) as f64;
    let mut out = SweepResult::new("d", axis_of(&cfg.d_rank))?;
    for &id in &cfg.scenarios {
        let col = cfg
            .d_rank
            .iter()
            .map(|&d| Ok(trace_product(&block_covariance_scenario(id, m, d)?, &ones)?.re / m2))
            .collect::<Result<Vec<_>>>()?;
        out.push_column(format!("s{id}"), col)?;
    }
    out.push_metadata("m", m)?;
    Ok(out)
}

fn checked_one_ring(m: usize, spread_deg: f64, nominal: f64, spacing: f64) -> Result<CovarianceMatrix> {
    let q = one_ring_covariance(&OneRingConfig::new(m, spread_deg.to_radians(), nominal, spacing)?)?;
    q.psd_eigenvalues()?;
    Ok(q)
}

/// Column name for a spread in degrees, e.g. `spread1_deg_2.5`.
pub fn spread_column(spread1_deg: f64) -> String {
    format!("spread1_deg_{spread1_deg}")
}

/// `tr(Q_1 Q_2) / M` for two one-ring users, against the second user's
/// spread; one column per first-user spread (see [`spread_column`]).
///
/// Every covariance is checked Hermitian and positive semidefinite.
pub fn run_one_ring_interference(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect(cfg, ExperimentId::OneRingInterference)?;
    let m = cfg.m[0];
    let [nominal1, nominal2] = cfg.phi0;
    let q2s = cfg
        .spread2_deg
        .iter()
        .map(|&s| checked_one_ring(m, s, nominal2, cfg.spacing))
        .collect::<Result<Vec<_>>>()?;
    let mut out = SweepResult::new("spread2_deg", cfg.spread2_deg.clone())?;
    for &s1 in &cfg.spread1_deg {
        let q1 = checked_one_ring(m, s1, nominal1, cfg.spacing)?;
        let col = q2s
            .iter()
            .map(|q2| Ok(trace_product(q1.matrix(), q2.matrix())?.re / m as f64))
            .collect::<Result<Vec<_>>>()?;
        out.push_column(spread_column(s1), col)?;
    }
    out.push_metadata("m", m)?;
    Ok(out)
}

/// The pair of random users behind moment-validate row block `index`.
pub fn moment_validate_pair(cfg: &ExperimentConfig, index: usize) -> Result<(UserChannelSpec, UserChannelSpec)> {
    let m = cfg.m[0];
    let mut rng = rng_stream(derive_seed(cfg.mc.seed, &[SPEC_TAG, index as u64]), 0);
    let k_factor = |rng: &mut rand_chacha::ChaCha8Rng| match cfg.k_factor {
        Some(k) => k,
        None => rng.random_range(0.0..=cfg.k_max),
    };
    let kk = k_factor(&mut rng);
    let k = random_spec(m, kk, cfg.spacing, &mut rng)?;
    let kl = k_factor(&mut rng);
    let l = random_spec(m, kl, cfg.spacing, &mut rng)?;
    Ok((k, l))
}

/// Closed forms against Monte Carlo for `specs` random user pairs.
///
/// Three rows per pair, tagged by `metric`: 1 for `E|h_k|^2`, 2 for
/// `E|h_k|^4`, 3 for `E|h_k^H h_l|^2`. A deterministic row (zero standard
/// error) has `z = 0` when it matches exactly.
pub fn run_moment_validate(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect(cfg, ExperimentId::MomentValidate)?;
    let names = ["spec", "metric", "k_factor_k", "k_factor_l", "closed_form", "mc", "std_error", "z"];
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(3 * cfg.specs); names.len()];
    for i in 0..cfg.specs {
        let (k, l) = moment_validate_pair(cfg, i)?;
        let mc = cfg.mc.with_seed(derive_seed(cfg.mc.seed, &[MC_TAG, i as u64]));
        let est = estimate_pair_moments(&k, &l, &mc)?;
        let rows = [
            (METRIC_GAIN2, second_moment(&k), est.gain2),
            (METRIC_GAIN4, fourth_moment(&k), est.gain4),
            (METRIC_CROSS, cross_moment(&k, &l)?.total(), est.cross),
        ];
        for (metric, closed, e) in rows {
            let row = [
                i as f64,
                metric,
                k.k_factor(),
                l.k_factor(),
                closed,
                e.mean,
                e.std_error,
                e.z_score(closed),
            ];
            for (c, v) in cols.iter_mut().zip(row) {
                c.push(v);
            }
        }
    }
    let n = cols[0].len();
    let mut out = SweepResult::new("row", (0..n).map(|r| r as f64).collect())?;
    for (name, c) in names.into_iter().zip(cols) {
        out.push_column(name, c)?;
    }
    out.push_metadata("m", cfg.m[0])?;
    out.push_metadata("trials", cfg.mc.trials)?;
    out.push_metadata("workers", cfg.mc.workers)?;
    out.push_metadata("metric_codes", "1=E|h_k|^2 2=E|h_k|^4 3=E|h_k^H h_l|^2")?;
    Ok(out)
}

/// Every [`ScalingMetric`] against `M` for each coupling scenario, with the
/// fitted growth exponent in the metadata (`s<id>_<metric>_exponent`).
///
/// Both users get independent Haar bases, drawn once per `M` and shared by
/// all scenarios; their LoS angles are `phi0`.
pub fn run_scaling_diagnostic(cfg: &ExperimentConfig) -> Result<SweepResult> {
    expect(cfg, ExperimentId::ScalingDiagnostic)?;
    let k_factor = cfg.k_factor.expect("validated");
    let bases = cfg
        .m
        .iter()
        .map(|&m| {
            let draw = |user: u64| haar_unitary(m, &mut rng_stream(derive_seed(cfg.mc.seed, &[BASIS_TAG, m as u64, user]), 0));
            Ok((draw(0)?, draw(1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SweepResult::new("m", axis_of(&cfg.m))?;
    let mut exponents = Vec::new();
    for scenario in cfg.coupling_scenarios()? {
        let pairs = cfg
            .m
            .iter()
            .zip(&bases)
            .map(|(&m, (uk, ul))| {
                let omega = scenario.coupling(m)?;
                Ok((
                    UserChannelSpec::new(k_factor, uk.clone(), omega.clone(), ula_steering(m, cfg.phi0[0], cfg.spacing)?)?,
                    UserChannelSpec::new(k_factor, ul.clone(), omega, ula_steering(m, cfg.phi0[1], cfg.spacing)?)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        for metric in ScalingMetric::ALL {
            let diag = assess_scaling(metric, &pairs)?;
            let name = format!("s{}_{}", scenario.id(), metric.name());
            exponents.push((
                format!("{name}_exponent"),
                diag.exponent.map_or_else(|| "none".to_string(), |e| format!("{e:.6}")),
            ));
            out.push_column(name, diag.values)?;
        }
    }
    for (k, v) in exponents {
        out.push_metadata(k, v)?;
    }
    Ok(out)
}

/// Checks a one-ring covariance the way the interference sweep does and
/// reports `(hermitian, psd, unit_diagonal)`.
pub fn one_ring_checks(m: usize, spread_deg: f64, nominal: f64, spacing: f64) -> Result<(bool, bool, bool)> {
    let q = one_ring_covariance(&OneRingConfig::new(m, spread_deg.to_radians(), nominal, spacing)?)?;
    let unit = (0..m).all(|i| q.matrix()[(i, i)] == num_complex::Complex64::new(1.0, 0.0));
    Ok((q.matrix().is_hermitian(), q.psd_eigenvalues().is_ok(), unit))
}

/// Convenience wrapper used by examples: trace interference of two
/// one-ring users with bounds.
pub fn one_ring_pair_interference(
    m: usize,
    spreads_deg: [f64; 2],
    nominals: [f64; 2],
    spacing: f64,
) -> Result<crate::moments::TraceInterference> {
    let q1 = checked_one_ring(m, spreads_deg[0], nominals[0], spacing)?;
    let q2 = checked_one_ring(m, spreads_deg[1], nominals[1], spacing)?;
    trace_interference(q1.matrix(), q2.matrix())
}
