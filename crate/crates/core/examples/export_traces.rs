//! Writes position and link tables for one world at a few instants after
//! the workflow start, for plotting outside this crate.

use hyperdrive::harness::export::{export_traces, LATENCY_FILE, POSITIONS_FILE};
use hyperdrive::harness::ScenarioConfig;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("hyperdrive-traces"));
    let cfg = ScenarioConfig::wildfire();
    let (positions, links) = export_traces(&cfg, 1118, 1, &[0.0, 300.0, 600.0], &out).expect("export");
    println!("{positions} position rows and {links} link rows in {}", out.display());
    for file in [POSITIONS_FILE, LATENCY_FILE] {
        let text = std::fs::read_to_string(out.join(file)).unwrap();
        println!("\n{file}:");
        for line in text.lines().take(4) {
            println!("  {line}");
        }
    }
}
