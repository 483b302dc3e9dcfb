//! Closed-form second, fourth and cross moments against brute-force
//! sampling for a handful of random user pairs.
//!
//!     cargo run --release --example moment_validation

use weichsel::channel::random_spec;
use weichsel::moments::{cross_moment, fourth_moment, second_moment};
use weichsel::montecarlo::{estimate_pair_moments, rng_stream, McConfig};

fn main() -> weichsel::Result<()> {
    let mut rng = rng_stream(2024, 0);
    let cfg = McConfig::new(200_000, 5, 4)?;
    println!("{:>4} {:>6} {:>6} {:>8} {:>8} {:>8}", "pair", "K_k", "K_l", "z(|h|2)", "z(|h|4)", "z(x)");
    for pair in 0..6 {
        let (kk, kl) = (pair as f64 * 0.8, 4.0 - pair as f64 * 0.5);
        let k = random_spec(16, kk, 0.5, &mut rng)?;
        let l = random_spec(16, kl, 0.5, &mut rng)?;
        let est = estimate_pair_moments(&k, &l, &cfg.with_seed(pair))?;
        println!(
            "{pair:>4} {kk:>6.2} {kl:>6.2} {:>8.2} {:>8.2} {:>8.2}",
            est.gain2.z_score(second_moment(&k)),
            est.gain4.z_score(fourth_moment(&k)),
            est.cross.z_score(cross_moment(&k, &l)?.total()),
        );
    }
    Ok(())
}
