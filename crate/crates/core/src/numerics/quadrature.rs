//! Composite Gauss–Legendre quadrature for complex-valued integrands.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes per panel.
pub const NODES: usize = 64;

/// Widest panel used by [`integrate`].
pub const DEFAULT_PANEL_WIDTH: f64 = std::f64::consts::PI / 8.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

/// Integrates `f` over `[lo, hi]` with 64-node panels no wider than π/8.
pub fn integrate(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64) -> Result<Complex64> {
    integrate_with_panel(f, lo, hi, DEFAULT_PANEL_WIDTH)
}

/// Same as [`integrate`] with a caller-chosen maximum panel width; highly
/// oscillatory integrands need panels narrower than the default.
pub fn integrate_with_panel(
    f: impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    max_width: f64,
) -> Result<Complex64> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidArgument(format!("bad integration interval [{lo}, {hi}]")));
    }
    if !(max_width > 0.0) {
        return Err(Error::InvalidArgument("panel width must be positive".into()));
    }
    let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
    let width = (hi - lo) / panels as f64;
    let (nodes, weights) = rule();
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights) {
            let v = f(mid + half * x);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("integrand at {}", mid + half * x)));
            }
            acc += v * *w;
        }
        total += acc * half;
    }
    Ok(total)
}
