//! Runs the flagship config through the library front end and writes the
//! reports to a temporary directory.
//!
//! cargo run --release --example experiment

use wapprox::cli::{write_reports, ExperimentConfig};

fn main() -> wapprox::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/flagship.json");
    let exp = ExperimentConfig::load(path.as_ref())?.build()?;
    let reports = exp.run(&["jackson".into(), "inverse".into()])?;
    let out = std::env::temp_dir().join("wapprox-experiment");
    write_reports(&out, &reports)?;
    for r in &reports {
        println!("{}", r.summary_line());
    }
    println!("reports in {}", out.display());
    Ok(())
}
