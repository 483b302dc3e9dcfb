//! Growth exponents of the peak quantities that decide whether hardening and
//! favorable propagation survive as `M` grows.
//!
//!     cargo run --release --example scaling

use std::f64::consts::PI;

use weichsel::channel::{ula_steering, CouplingScenario, UserChannelSpec};
use weichsel::moments::{assess_scaling, ScalingMetric};
use weichsel::numerics::haar_unitary;
use weichsel::montecarlo::rng_stream;

fn main() -> weichsel::Result<()> {
    let mut rng = rng_stream(1, 0);
    for scenario in CouplingScenario::ALL {
        let mut pairs = Vec::new();
        for m in [16, 32, 64, 128, 256] {
            let user = |phi: f64, rng: &mut _| {
                UserChannelSpec::new(0.5, haar_unitary(m, rng)?, scenario.coupling(m)?, ula_steering(m, phi, 0.5)?)
            };
            pairs.push((user(PI / 4.0, &mut rng)?, user(3.0 * PI / 4.0, &mut rng)?));
        }
        print!("scenario {}:", scenario.id());
        for metric in [ScalingMetric::CouplingPeak, ScalingMetric::CouplingProductPeak, ScalingMetric::BasisOverlapPeak] {
            let d = assess_scaling(metric, &pairs)?;
            match d.exponent {
                Some(e) => print!("  {} ~ M^{e:.2}", metric.name()),
                None => print!("  {} n/a", metric.name()),
            }
        }
        println!();
    }
    Ok(())
}
