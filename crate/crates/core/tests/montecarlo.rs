use std::f64::consts::PI;

use weichsel::channel::{random_spec, ula_steering, CouplingScenario, UserChannelSpec};
use weichsel::moments::{cross_moment, fourth_moment};
use weichsel::montecarlo::{
    estimate_cross_moment, estimate_gain_moments, estimate_pair_moments, rng_stream, McConfig,
};
use weichsel::numerics::ComplexMatrix;

fn scenario_spec(m: usize, k: f64, scenario: CouplingScenario) -> UserChannelSpec {
    UserChannelSpec::new(
        k,
        ComplexMatrix::identity(m),
        scenario.coupling(m).unwrap(),
        ula_steering(m, PI / 3.0, 0.5).unwrap(),
    )
    .unwrap()
}

#[test]
fn identical_config_is_bit_identical() {
    let mut rng = rng_stream(5, 0);
    let k = random_spec(12, 1.0, 0.5, &mut rng).unwrap();
    let l = random_spec(12, 3.0, 0.5, &mut rng).unwrap();
    let cfg = McConfig::new(20_000, 77, 5).unwrap();
    let a = estimate_pair_moments(&k, &l, &cfg).unwrap();
    let b = estimate_pair_moments(&k, &l, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.cross.mean.to_bits(), b.cross.mean.to_bits());
}

#[test]
fn worker_count_changes_streams_not_the_distribution() {
    let mut rng = rng_stream(6, 0);
    let k = random_spec(10, 0.7, 0.5, &mut rng).unwrap();
    let l = random_spec(10, 2.0, 0.5, &mut rng).unwrap();
    let exact = cross_moment(&k, &l).unwrap().total();
    let mut means = Vec::new();
    for workers in [1, 2, 3, 8] {
        let est = estimate_cross_moment(&k, &l, &McConfig::new(100_000, 13, workers).unwrap()).unwrap();
        assert!(est.z_score(exact).abs() < 5.0, "workers {workers}: {est:?} vs {exact}");
        assert_eq!(est.trials, 100_000);
        means.push(est.mean);
    }
    assert_ne!(means[0], means[1]);
}

#[test]
fn gain_mean_concentrates_as_antennas_grow() {
    // |h|^2 / M -> 1 with fluctuations of order 1/sqrt(trials M) for flat coupling.
    let trials = 4000u64;
    let ms = [16usize, 64, 256];
    let mut avg_dev = vec![0.0; ms.len()];
    for seed in 0..10u64 {
        for (i, &m) in ms.iter().enumerate() {
            let spec = scenario_spec(m, 0.5, CouplingScenario::Uniform);
            let (m2, _) = estimate_gain_moments(&spec, &McConfig::new(trials, seed, 2).unwrap()).unwrap();
            let dev = (m2.mean / m as f64 - 1.0).abs();
            if m == 256 {
                assert!(dev <= 3.0 / ((trials * m as u64) as f64).sqrt(), "seed {seed}: {dev}");
            }
            avg_dev[i] += dev / 10.0;
        }
    }
    assert!(avg_dev.windows(2).all(|w| w[1] < w[0]), "{avg_dev:?}");
}

#[test]
fn standard_error_has_nominal_coverage() {
    let spec = scenario_spec(8, 1.0, CouplingScenario::Split);
    let exact4 = fourth_moment(&spec);
    let (mut hits2, mut hits4) = (0, 0);
    for seed in 0..100u64 {
        let (m2, m4) = estimate_gain_moments(&spec, &McConfig::new(2000, 1000 + seed, 2).unwrap()).unwrap();
        hits2 += usize::from((m2.mean - 8.0).abs() <= m2.std_error);
        hits4 += usize::from((m4.mean - exact4).abs() <= m4.std_error);
    }
    for hits in [hits2, hits4] {
        assert!((53..=83).contains(&hits), "coverage {hits}/100");
    }
}

#[test]
fn estimates_report_trial_count_and_nonnegative_errors() {
    let spec = scenario_spec(4, 0.0, CouplingScenario::Single);
    let (m2, m4) = estimate_gain_moments(&spec, &McConfig::new(1001, 3, 4).unwrap()).unwrap();
    assert_eq!(m2.trials, 1001);
    assert_eq!(m4.trials, 1001);
    assert!(m2.std_error > 0.0 && m4.std_error > 0.0);
}
