//! Injects commit conflicts from a simulated rival scheduler and compares
//! multi-commit (top 3 nodes) with single-commit on identical worlds.

use hyperdrive::harness::{build_world, run_cell, ScenarioConfig, SchedulerKind};

fn main() {
    let mut cfg = ScenarioConfig::wildfire();
    cfg.conflict_probability = 0.4;
    let worlds: Vec<_> = (1..=5).map(|s| build_world(&cfg, 1118, s).unwrap()).collect();

    println!("conflict probability {}\n", cfg.conflict_probability);
    println!("{:>8} {:>9} {:>9} {:>10} {:>9}", "top_k", "tries", "restarts", "abandoned", "complete");
    for attempts in [1, 2, 3] {
        cfg.hyperdrive.commit.attempts = attempts;
        let (mut tries, mut restarts, mut abandoned, mut complete) = (0, 0, 0, 0);
        for w in &worlds {
            let r = run_cell(&cfg, w, SchedulerKind::Hyperdrive);
            for d in &r.decisions {
                tries += d.commit_attempts;
                restarts += d.restarts;
                abandoned += u32::from(!d.is_committed());
            }
            complete += u32::from(r.complete);
        }
        println!("{attempts:>8} {tries:>9} {restarts:>9} {abandoned:>10} {complete:>7}/{}", worlds.len());
    }
}
