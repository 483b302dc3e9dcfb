//! Two users with independent Haar eigenbases: the variance of
//! `h_k^H h_l / M` falls like `1/M` when both couplings are flat and stays
//! put when both users pile all their power on one eigenvector.
//!
//!     cargo run --release --example favorable_propagation

use weichsel::channel::{BasisKind, ChannelTemplate, CouplingScenario};
use weichsel::moments::fp_variance;
use weichsel::montecarlo::{fp_trace, rng_stream, McConfig};

fn template(coupling: CouplingScenario, los_angle: f64) -> ChannelTemplate {
    ChannelTemplate { k_factor: 1.0, coupling, los_angle, spacing: 0.5, basis: BasisKind::Haar }
}

fn main() -> weichsel::Result<()> {
    let cfg = McConfig::new(5000, 3, 4)?;
    let m_values = [8, 32, 128];
    for scenario in [CouplingScenario::Uniform, CouplingScenario::Single] {
        let k = template(scenario, 0.7);
        let l = template(scenario, 2.1);
        let out = fp_trace(&k, &l, &m_values, &cfg)?;
        println!("scenario {}", scenario.id());
        let (cf, mc) = (out.column("closed_form").unwrap(), out.column("mc_second_moment").unwrap());
        for (i, m) in out.axis().iter().enumerate() {
            println!("  M={m:<4} E|h_k^H h_l|^2/M^2 = {:.4e} (mc {:.4e})", cf[i], mc[i]);
        }
    }

    // the four mechanisms for a single pair
    let mut rng = rng_stream(9, 0);
    let k = template(CouplingScenario::Split, 0.4).instantiate(64, &mut rng)?;
    let l = template(CouplingScenario::Split, 1.9).instantiate(64, &mut rng)?;
    let r = fp_variance(&k, &l)?;
    println!(
        "M=64 split coupling: los-los {:.3e}, nlos-nlos {:.3e}, k-los {:.3e}, l-los {:.3e}",
        r.term_los_los, r.term_nlos_nlos, r.term_k_los, r.term_l_los
    );
    println!("tr(Q_k Q_l) = {:.2} <= {:.2}", r.trace, r.trace_upper);
    Ok(())
}
