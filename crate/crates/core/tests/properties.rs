use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use weichsel::channel::{build_covariance, one_ring_covariance, random_spec, OneRingConfig, UserChannelSpec};
use weichsel::moments::{
    cross_moment, fourth_moment, fp_variance, hardening_variance, is_flat_coupling, trace_interference,
};
use weichsel::montecarlo::{estimate_pair_moments, McConfig};
use weichsel::numerics::{haar_unitary, ComplexMatrix, ComplexVector};

fn spec_from(seed: u64, m: usize, k: f64) -> UserChannelSpec {
    random_spec(m, k, 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// `gamma^2 U diag(omega) U^H`, formed by explicit products.
fn nlos_covariance(s: &UserChannelSpec) -> ComplexMatrix {
    let u = s.eigenbasis();
    let d = ComplexMatrix::from_real_diagonal(s.coupling());
    let q = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
    let g2 = s.gamma().powi(2);
    ComplexMatrix::from_fn(q.rows(), q.cols(), |i, j| q[(i, j)] * g2)
}

fn mean(s: &UserChannelSpec) -> ComplexVector {
    s.los().scale(Complex64::new(s.eta(), 0.0))
}

fn quad(c: &ComplexMatrix, x: &ComplexVector) -> f64 {
    x.dot(&c.matvec(x).unwrap()).unwrap().re
}

/// Gaussian moment identities for `h ~ CN(mu, C)`, evaluated on explicit matrices.
fn isserlis_fourth(s: &UserChannelSpec) -> f64 {
    let (c, mu) = (nlos_covariance(s), mean(s));
    let tr_c = c.trace().unwrap().re;
    let tr_c2 = c.matmul(&c).unwrap().trace().unwrap().re;
    (tr_c + mu.norm_sqr()).powi(2) + tr_c2 + 2.0 * quad(&c, &mu)
}

fn isserlis_cross(k: &UserChannelSpec, l: &UserChannelSpec) -> f64 {
    let (ck, cl, mk, ml) = (nlos_covariance(k), nlos_covariance(l), mean(k), mean(l));
    ck.matmul(&cl).unwrap().trace().unwrap().re + quad(&cl, &mk) + quad(&ck, &ml) + mk.dot(&ml).unwrap().norm_sqr()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fourth_moment_matches_variance(seed in any::<u64>(), m in 2usize..24, k in 0.0f64..20.0) {
        let s = spec_from(seed, m, k);
        let m2 = (m * m) as f64;
        let lhs = hardening_variance(&s).variance * m2 + m2;
        let rhs = fourth_moment(&s);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn closed_forms_match_gaussian_identities(seed in any::<u64>(), m in 2usize..12, kk in 0.0f64..5.0, kl in 0.0f64..5.0) {
        let k = spec_from(seed, m, kk);
        let l = spec_from(seed.wrapping_add(1), m, kl);
        let f4 = fourth_moment(&k);
        prop_assert!((f4 - isserlis_fourth(&k)).abs() < 1e-10 * f4);
        let c = cross_moment(&k, &l).unwrap().total();
        prop_assert!((c - isserlis_cross(&k, &l)).abs() < 1e-10 * c.max(1.0));
    }

    #[test]
    fn everything_is_nonnegative(seed in any::<u64>(), m in 2usize..16, k in 0.0f64..10.0) {
        let a = spec_from(seed, m, k);
        let b = spec_from(!seed, m, 10.0 - k);
        let h = hardening_variance(&a);
        prop_assert!(h.variance >= 0.0 && h.los_term >= 0.0 && h.nlos_term >= 0.0);
        let fp = fp_variance(&a, &b).unwrap();
        for t in [fp.variance, fp.term_los_los, fp.term_nlos_nlos, fp.term_k_los, fp.term_l_los, fp.trace] {
            prop_assert!(t >= 0.0);
        }
        prop_assert!(fp.trace <= fp.trace_upper * (1.0 + 1e-12));
    }

    #[test]
    fn rayleigh_ritz_containment(seed in any::<u64>(), m in 2usize..32) {
        let h = hardening_variance(&spec_from(seed, m, 1.0));
        prop_assert!(h.rr_lower - 1e-12 <= h.quadratic_form && h.quadratic_form <= h.rr_upper + 1e-12);
    }

    #[test]
    fn flat_coupling_variance_is_basis_free(seed in any::<u64>(), m in 2usize..64) {
        let u = haar_unitary(m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let los = weichsel::channel::ula_steering(m, 1.0, 0.5).unwrap();
        let s = UserChannelSpec::new(0.5, u, vec![1.0; m], los).unwrap();
        prop_assert!((hardening_variance(&s).variance - 8.0 / (9.0 * m as f64)).abs() < 1e-12);
    }
}

#[test]
fn one_ring_bound_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let m = 32;
    for _ in 0..100 {
        let mut q = || {
            let spread = rng.random_range(0.5f64..90.0).to_radians();
            let nominal = rng.random_range(0.0..std::f64::consts::PI);
            one_ring_covariance(&OneRingConfig::new(m, spread, nominal, 0.5).unwrap()).unwrap()
        };
        let (a, b) = (q(), q());
        let t = trace_interference(a.matrix(), b.matrix()).unwrap();
        let bounds = t.bounds.as_ref().expect("one-ring covariances are PSD with trace M");
        assert!(t.value >= -1e-9 && t.value <= (m * m) as f64 * (1.0 + 1e-12));
        assert!(t.value <= bounds.upper * (1.0 + 1e-9) + 1e-9);
        if t.lower_bound_applies(0.01) {
            assert!(t.value >= bounds.lower * (1.0 - 1e-9));
        }
    }
}

#[test]
fn flat_pair_attains_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = 20;
    let a = build_covariance(&haar_unitary(m, &mut rng).unwrap(), &vec![1.0; m]).unwrap();
    let b = build_covariance(&haar_unitary(m, &mut rng).unwrap(), &vec![1.0; m]).unwrap();
    let t = trace_interference(a.matrix(), b.matrix()).unwrap();
    assert!(t.lower_bound_applies(0.01));
    assert!((t.value - m as f64).abs() < 1e-9);
}

#[test]
fn aligned_rank_one_maximizes_interference() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = 12;
    let uk = haar_unitary(m, &mut rng).unwrap();
    let ul = haar_unitary(m, &mut rng).unwrap();
    let v = ul.adjoint_matmul(&uk).unwrap();
    let (mut bi, mut bj, mut best) = (0, 0, 0.0);
    for i in 0..m {
        for j in 0..m {
            if v[(i, j)].norm_sqr() > best {
                (bi, bj, best) = (i, j, v[(i, j)].norm_sqr());
            }
        }
    }
    let spike = |i: usize| (0..m).map(|n| if n == i { m as f64 } else { 0.0 }).collect::<Vec<_>>();
    let aligned = trace_interference(
        build_covariance(&uk, &spike(bj)).unwrap().matrix(),
        build_covariance(&ul, &spike(bi)).unwrap().matrix(),
    )
    .unwrap()
    .value;
    assert!((aligned - (m * m) as f64 * best).abs() < 1e-9 * aligned);
    let mut dirichlet = || {
        let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|w| w * m as f64 / s).collect::<Vec<f64>>()
    };
    for _ in 0..100 {
        let (wk, wl) = (dirichlet(), dirichlet());
        assert!(!is_flat_coupling(&wk, 0.01));
        let t = trace_interference(
            build_covariance(&uk, &wk).unwrap().matrix(),
            build_covariance(&ul, &wl).unwrap().matrix(),
        )
        .unwrap();
        assert!(t.value <= aligned * (1.0 + 1e-12));
    }
}

#[test]
fn oracle_equivalence_small_arrays() {
    for (i, m) in [4usize, 8, 16].into_iter().enumerate() {
        let k = spec_from(100 + i as u64, m, 0.8);
        let l = spec_from(200 + i as u64, m, 3.0);
        let est = estimate_pair_moments(&k, &l, &McConfig::new(1_000_000, i as u64, 4).unwrap()).unwrap();
        assert!(est.gain2.z_score(m as f64).abs() <= 5.0, "M={m} {:?}", est.gain2);
        assert!(est.gain4.z_score(fourth_moment(&k)).abs() <= 5.0, "M={m} {:?}", est.gain4);
        let cross = cross_moment(&k, &l).unwrap().total();
        assert!(est.cross.z_score(cross).abs() <= 5.0, "M={m} {:?}", est.cross);
    }
}
