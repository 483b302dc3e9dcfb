//! Any experiment from a JSON config, written as CSV and read back.
//!
//!     cargo run --release --example sweep_csv -- '{"experiment": "scaling-diagnostic"}'

use weichsel::experiment::{run, ConfigOverrides, ExperimentConfig};
use weichsel::sweep::SweepResult;

fn main() -> weichsel::Result<()> {
    let json = std::env::args()
        .nth(1)
        .unwrap_or_else(|| r#"{"experiment": "block-interference", "d_rank": [1, 25, 50, 75, 99]}"#.into());
    let overrides = ConfigOverrides::from_json(&json)?;
    let id = overrides
        .experiment
        .ok_or_else(|| weichsel::Error::Config("the config must name an experiment".into()))?;
    let cfg = ExperimentConfig::resolve(id, &[&overrides])?;
    let csv = run(&cfg)?.to_csv_string();
    print!("{csv}");
    let back = SweepResult::from_csv_str(&csv)?;
    assert_eq!(back.to_csv_string(), csv);
    eprintln!("{} rows, columns: {}", back.len(), back.column_names().collect::<Vec<_>>().join(" "));
    Ok(())
}
