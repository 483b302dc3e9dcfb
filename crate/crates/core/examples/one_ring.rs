//! One-ring covariances for a half-wavelength ULA and the overlap
//! `tr(Q_1 Q_2)/M` between a narrow-spread user and a widening second user.
//!
//!     cargo run --release --example one_ring

use std::f64::consts::PI;

use weichsel::channel::{one_ring_covariance, OneRingConfig};
use weichsel::moments::trace_interference;

fn main() -> weichsel::Result<()> {
    let m = 64;
    let narrow = one_ring_covariance(&OneRingConfig::new(m, 5f64.to_radians(), PI / 4.0, 0.5)?)?;
    let ev = narrow.psd_eigenvalues()?;
    let dominant = ev.iter().filter(|&&x| x > 1e-3 * ev[ev.len() - 1].max(ev[0])).count();
    println!("5 deg spread, M={m}: trace {:.6}, {dominant} eigenvalues above 1e-3 of the peak", narrow.trace());

    println!("{:>10} {:>14} {:>14}", "spread2", "tr(Q1Q2)/M", "upper/M");
    for spread2 in [1.0f64, 5.0, 10.0, 20.0, 40.0, 80.0] {
        let wide = one_ring_covariance(&OneRingConfig::new(m, spread2.to_radians(), 3.0 * PI / 4.0, 0.5)?)?;
        let t = trace_interference(narrow.matrix(), wide.matrix())?;
        let upper = t.bounds.map(|b| b.upper).unwrap_or(f64::NAN);
        println!("{spread2:>10} {:>14.4} {:>14.2}", t.value / m as f64, upper / m as f64);
    }
    Ok(())
}
