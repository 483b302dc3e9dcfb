//! Normalized interference `tr(Q 11^H)/M^2` between a rank-D block covariance
//! and a fully correlated one, as D sweeps from 1 to M-1.
//!
//!     cargo run --example block_interference

use weichsel::experiment::{run, ConfigOverrides, ExperimentConfig, ExperimentId};

fn main() -> weichsel::Result<()> {
    let overrides = ConfigOverrides::from_json(r#"{"m": [40], "d_rank": [1, 2, 5, 10, 20, 30, 39]}"#)?;
    let cfg = ExperimentConfig::resolve(ExperimentId::BlockInterference, &[&overrides])?;
    let out = run(&cfg)?;
    println!("{:>4} {:>10} {:>10}", "D", "s1", "s2");
    let (s1, s2) = (out.column("s1").unwrap(), out.column("s2").unwrap());
    for (i, d) in out.axis().iter().enumerate() {
        println!("{d:>4} {:>10.4} {:>10.4}", s1[i], s2[i]);
    }
    Ok(())
}
