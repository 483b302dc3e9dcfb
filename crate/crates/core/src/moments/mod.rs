//! Closed-form channel statistics.
//!
//! Notation: `v = U^H h_los` is the line-of-sight response expressed in the
//! user's eigenbasis and `Lambda = diag(omega)`. Every quadratic form is
//! accumulated as `sum_i omega_i |v_i|^2` so that results are nonnegative
//! regardless of rounding.

mod scaling;

pub use scaling::{assess_scaling, fit_exponent, ScalingDiagnostic, ScalingMetric};

use num_complex::Complex64;

use crate::channel::UserChannelSpec;
use crate::error::{Error, Result};
use crate::numerics::{trace_product, ComplexMatrix, ComplexVector};

/// Scaled variance of the channel gain, split into its two mechanisms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardeningReport {
    /// `Var(|h|^2 / E|h|^2) = gamma^2 / M^2 * (los_term + nlos_term)`.
    pub variance: f64,
    /// `2 eta^2 v^H Lambda v`.
    pub los_term: f64,
    /// `gamma^2 tr(Lambda^2)`.
    pub nlos_term: f64,
    /// `v^H Lambda v / M^2`, the quantity bracketed by the Rayleigh–Ritz bounds.
    pub quadratic_form: f64,
    pub rr_lower: f64,
    pub rr_upper: f64,
}

/// The four nonnegative contributions to `E|h_k^H h_l|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossMomentTerms {
    /// `eta_k^2 eta_l^2 |h_los_k^H h_los_l|^2`
    pub los_los: f64,
    /// `gamma_k^2 gamma_l^2 tr(Q_k Q_l)`
    pub nlos_nlos: f64,
    /// `eta_k^2 gamma_l^2 h_los_k^H Q_l h_los_k`
    pub k_los: f64,
    /// `gamma_k^2 eta_l^2 h_los_l^H Q_k h_los_l`
    pub l_los: f64,
    /// `tr(Q_k Q_l)` on its own.
    pub trace: f64,
    /// `max |V_kl|^2` with `V_kl = U_l^H U_k`.
    pub overlap_peak_sqr: f64,
}

impl CrossMomentTerms {
    pub fn total(&self) -> f64 {
        self.los_los + self.nlos_nlos + self.k_los + self.l_los
    }
}

/// Variance of the normalized inner product `h_k^H h_l / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpReport {
    pub variance: f64,
    pub term_los_los: f64,
    pub term_nlos_nlos: f64,
    pub term_k_los: f64,
    pub term_l_los: f64,
    pub trace: f64,
    /// `M^2 max |V_kl|^2`; always valid.
    pub trace_upper: f64,
    /// `M`; only a guaranteed bound when both couplings are flat.
    pub trace_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceBounds {
    /// `M^2 ||V_kl||_max^2`.
    pub upper: f64,
    /// `||V_kl||_F^2 = M`.
    pub lower: f64,
    /// Clipped eigenvalues of both inputs, used to decide whether the lower
    /// bound is guaranteed.
    pub eigenvalues_k: Vec<f64>,
    pub eigenvalues_l: Vec<f64>,
}

#[inline]
fn weighted_norm_sqr(omega: &[f64], v: &ComplexVector) -> f64 {
    omega.iter().zip(v.iter()).map(|(w, z)| w * z.norm_sqr()).sum()
}

/// `v^H Lambda v` for a user.
pub fn los_quadratic_form(spec: &UserChannelSpec) -> f64 {
    weighted_norm_sqr(spec.coupling(), &spec.los_in_eigenbasis())
}

/// `tr(Lambda^2) + (tr Lambda)^2`, the fourth moment of the NLoS part's norm.
pub fn nlos_fourth_moment(omega: &[f64]) -> f64 {
    let tr: f64 = omega.iter().sum();
    let tr2: f64 = omega.iter().map(|w| w * w).sum();
    tr2 + tr * tr
}

/// `E|h|^4 = gamma^4 tr(Lambda^2) + M^2 + 2 eta^2 gamma^2 v^H Lambda v`.
pub fn fourth_moment(spec: &UserChannelSpec) -> f64 {
    let m = spec.antennas() as f64;
    let (eta2, gamma2) = (spec.eta().powi(2), spec.gamma().powi(2));
    let tr2: f64 = spec.coupling().iter().map(|w| w * w).sum();
    gamma2 * gamma2 * tr2 + m * m + 2.0 * eta2 * gamma2 * los_quadratic_form(spec)
}

/// `E|h|^2 = M` for every valid spec.
pub fn second_moment(spec: &UserChannelSpec) -> f64 {
    spec.antennas() as f64
}

pub fn hardening_variance(spec: &UserChannelSpec) -> HardeningReport {
    let m = spec.antennas() as f64;
    let (eta2, gamma2) = (spec.eta().powi(2), spec.gamma().powi(2));
    let q = los_quadratic_form(spec);
    let tr2: f64 = spec.coupling().iter().map(|w| w * w).sum();
    let los_term = 2.0 * eta2 * q;
    let nlos_term = gamma2 * tr2;
    let (rr_lower, rr_upper) = rayleigh_ritz_bounds(spec);
    HardeningReport {
        variance: gamma2 / (m * m) * (los_term + nlos_term),
        los_term,
        nlos_term,
        quadratic_form: q / (m * m),
        rr_lower,
        rr_upper,
    }
}

/// `(min(omega) / M, max(omega) / M)`, which bracket `v^H Lambda v / M^2`.
pub fn rayleigh_ritz_bounds(spec: &UserChannelSpec) -> (f64, f64) {
    let m = spec.antennas() as f64;
    let w = spec.coupling();
    let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo / m, hi / m)
}

/// `(omega_1 + omega_2) / (2M)`: the normalized quadratic form of a
/// line-of-sight response split evenly over the first two eigenvectors.
pub fn quadratic_form_alignment(omega: &[f64]) -> Result<f64> {
    if omega.len() < 2 {
        return Err(Error::InvalidArgument("alignment example needs M >= 2".into()));
    }
    Ok((omega[0] + omega[1]) / (2.0 * omega.len() as f64))
}

/// Builds `h = sqrt(M/2) (u_1 + u_2)` and `Q = U diag(omega) U^H` explicitly
/// and returns `h^H Q h / M^2`. Used to check [`quadratic_form_alignment`].
pub fn quadratic_form_alignment_explicit(u: &ComplexMatrix, omega: &[f64]) -> Result<f64> {
    let q = crate::channel::build_covariance(u, omega)?;
    let m = u.rows();
    if m < 2 {
        return Err(Error::InvalidArgument("alignment example needs M >= 2".into()));
    }
    let s = (m as f64 / 2.0).sqrt();
    let h = ComplexVector::new((0..m).map(|i| (u[(i, 0)] + u[(i, 1)]) * s).collect())?;
    let qh = q.matrix().matvec(&h)?;
    Ok(h.dot(&qh)?.re / (m * m) as f64)
}

fn check_same_size(k: &UserChannelSpec, l: &UserChannelSpec) -> Result<()> {
    if k.antennas() != l.antennas() {
        return Err(Error::dims(
            format!("{} antennas", k.antennas()),
            format!("{} antennas", l.antennas()),
        ));
    }
    Ok(())
}

/// `tr(Q_k Q_l) = sum_mn omega_l,m omega_k,n |V_kl(m, n)|^2` together with
/// `max |V_kl|^2`, computed from the two eigenbases.
fn eigenbasis_trace(k: &UserChannelSpec, l: &UserChannelSpec) -> (f64, f64) {
    let v = l
        .eigenbasis()
        .adjoint_matmul(k.eigenbasis())
        .expect("sizes checked");
    let (wl, wk) = (l.coupling(), k.coupling());
    let mut trace = 0.0;
    let mut peak: f64 = 0.0;
    for (mi, &wlm) in wl.iter().enumerate() {
        for (ni, &wkn) in wk.iter().enumerate() {
            let a = v[(mi, ni)].norm_sqr();
            peak = peak.max(a);
            trace += wlm * wkn * a;
        }
    }
    (trace, peak)
}

/// `E|h_k^H h_l|^2` for independent users, with its four-term breakdown.
pub fn cross_moment(k: &UserChannelSpec, l: &UserChannelSpec) -> Result<CrossMomentTerms> {
    check_same_size(k, l)?;
    let (eta_k2, gamma_k2) = (k.eta().powi(2), k.gamma().powi(2));
    let (eta_l2, gamma_l2) = (l.eta().powi(2), l.gamma().powi(2));
    let los_dot = k.los().dot(l.los())?;
    let (trace, overlap_peak_sqr) = eigenbasis_trace(k, l);
    // h_k^H Q_l h_k = sum_i omega_l,i |(U_l^H h_k)_i|^2
    let k_in_l = l.eigenbasis().adjoint_matvec(k.los())?;
    let l_in_k = k.eigenbasis().adjoint_matvec(l.los())?;
    Ok(CrossMomentTerms {
        los_los: eta_k2 * eta_l2 * los_dot.norm_sqr(),
        nlos_nlos: gamma_k2 * gamma_l2 * trace,
        k_los: eta_k2 * gamma_l2 * weighted_norm_sqr(l.coupling(), &k_in_l),
        l_los: gamma_k2 * eta_l2 * weighted_norm_sqr(k.coupling(), &l_in_k),
        trace,
        overlap_peak_sqr,
    })
}

/// `Var(h_k^H h_l / M) = E|h_k^H h_l|^2 / M^2`.
pub fn fp_variance(k: &UserChannelSpec, l: &UserChannelSpec) -> Result<FpReport> {
    let terms = cross_moment(k, l)?;
    let m = k.antennas() as f64;
    let m2 = m * m;
    Ok(FpReport {
        variance: terms.total() / m2,
        term_los_los: terms.los_los,
        term_nlos_nlos: terms.nlos_nlos,
        term_k_los: terms.k_los,
        term_l_los: terms.l_los,
        trace: terms.trace,
        trace_upper: m2 * terms.overlap_peak_sqr,
        trace_lower: m,
    })
}

/// `tr(Q_k Q_l)` for arbitrary square matrices of equal size.
///
/// Bounds are attached only when both inputs are Hermitian, positive
/// semidefinite (after clipping) and have trace `M`; otherwise, e.g. for the
/// non-Hermitian block layout of the rank study, only the value is returned.
pub fn trace_interference(q_k: &ComplexMatrix, q_l: &ComplexMatrix) -> Result<TraceInterference> {
    let value = trace_product(q_k, q_l)?.re;
    let bounds = covariance_bounds(q_k, q_l)?;
    Ok(TraceInterference { value, bounds })
}

/// `tr(Q_k Q_l)` with its bounds, when they apply.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceInterference {
    pub value: f64,
    pub bounds: Option<TraceBounds>,
}

impl TraceInterference {
    /// True when both eigenvalue lists are within `rel_tol` of the flat
    /// coupling `[1, ..., 1]`, the case where the lower bound is exact.
    pub fn lower_bound_applies(&self, rel_tol: f64) -> bool {
        self.bounds
            .as_ref()
            .is_some_and(|b| is_flat_coupling(&b.eigenvalues_k, rel_tol) && is_flat_coupling(&b.eigenvalues_l, rel_tol))
    }
}

/// All entries within `rel_tol` of 1.
pub fn is_flat_coupling(omega: &[f64], rel_tol: f64) -> bool {
    omega.iter().all(|w| (w - 1.0).abs() <= rel_tol)
}

fn covariance_bounds(q_k: &ComplexMatrix, q_l: &ComplexMatrix) -> Result<Option<TraceBounds>> {
    use crate::channel::CovarianceMatrix;
    let (Ok(ck), Ok(cl)) = (CovarianceMatrix::new(q_k.clone()), CovarianceMatrix::new(q_l.clone())) else {
        return Ok(None);
    };
    if !(ck.is_normalized() && cl.is_normalized()) {
        return Ok(None);
    }
    let (Ok(wk), Ok(wl)) = (ck.psd_eigenvalues(), cl.psd_eigenvalues()) else {
        return Ok(None);
    };
    let v = cl.eigen()?.vectors.adjoint_matmul(&ck.eigen()?.vectors)?;
    let peak = v.as_slice().iter().map(Complex64::norm_sqr).fold(0.0, f64::max);
    let m = q_k.rows() as f64;
    Ok(Some(TraceBounds {
        upper: m * m * peak,
        lower: m,
        eigenvalues_k: wk,
        eigenvalues_l: wl,
    }))
}
