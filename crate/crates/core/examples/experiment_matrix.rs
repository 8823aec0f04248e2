//! Runs a reduced scheduler x size x seed matrix in memory, then prints the
//! per-scheduler summary and the matrix checks.

use hyperdrive::harness::checks::experiment_checks;
use hyperdrive::harness::output::summary_csv;
use hyperdrive::harness::{run_experiment, summarize, RunOptions, ScenarioConfig};

fn main() {
    let mut cfg = ScenarioConfig::wildfire();
    cfg.sizes = vec![1118, 2236, 3354];
    cfg.seeds = vec![1, 2, 3];

    let started = std::time::Instant::now();
    let records = run_experiment(&cfg, &RunOptions::default()).expect("valid scenario");
    println!("{} cells in {:.1}s\n", records.len(), started.elapsed().as_secs_f64());

    let summary = summarize(&records);
    summary_csv(&summary, std::io::stdout()).unwrap();
    println!();
    for s in &summary.schedulers {
        let by_size: Vec<String> = s.e2e_by_size.iter().map(|(n, ms)| format!("{n}:{ms:.1}")).collect();
        println!("{:<12} mean E2E by size (ms) {}", s.scheduler.to_string(), by_size.join(" "));
    }
    println!();
    for c in experiment_checks(&records, &summary) {
        println!("{c}");
    }
}
