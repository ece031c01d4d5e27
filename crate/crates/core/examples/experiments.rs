//! Run an experiment config and write its report-v1 JSON and CSV.
//!
//! `cargo run --release --example experiments -- configs/sandwich.yaml`
//! runs a shipped config; without an argument a small in-memory one runs.

use stmc::harness::{ExperimentConfig, SandwichConfig};

fn main() -> stmc::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::Sandwich(SandwichConfig { trials: 20, ..Default::default() }),
    };
    let report = cfg.run()?;
    println!("{}: {:?} in {:.2}s", report.experiment, report.verdict, report.runtime_s);
    for case in report.cases.iter().take(5) {
        println!("  {:<40} {}", case.name, if case.pass { "pass" } else { "FAIL" });
    }
    for case in report.failures() {
        println!("  failed: {}", case.name);
    }
    let out = std::env::temp_dir().join("stmc-example").join("report.json");
    for f in report.write(&out, true)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
