//! Load a scenario file and run its suite.
//!
//! cargo run --example scenario_report -- crates/core/scenarios/free_mixed.json

use std::path::PathBuf;

use freedil::harness::{ingest, run_theorem_suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/free_haar.json")));
    let ing = ingest(&path)?;
    let report = run_theorem_suite(&ing.scenario, &ing.inputs);
    print!("{}", report.to_text(false));
    std::process::exit(if report.pass() { 0 } else { 1 });
}
