//! Schedules the wildfire workflow once with every scheduler on the same
//! world and prints where each function landed and the achieved latencies.

use hyperdrive::harness::{build_world, run_cell, ScenarioConfig, SchedulerKind};

fn main() {
    let cfg = ScenarioConfig::wildfire();
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let world = build_world(&cfg, 1118, seed).expect("bundled scenario builds");
    println!("seed {seed}, workflow starts at t={:.0}s\n", world.start_s);

    for kind in SchedulerKind::ALL {
        let r = run_cell(&cfg, &world, kind);
        println!("== {kind}");
        for (task, node) in &r.placements {
            let rec = &world.infra.nodes()[node.index()];
            println!("  {:<16} -> {:<14} ({})", task.as_str(), rec.name, rec.kind);
        }
        for e in &r.edges {
            let slo = e.slo.and_then(|s| s.max_latency_ms).map_or("-".into(), |v| format!("{v:.0}"));
            let got = e.latency_ms.map_or("unreachable".into(), |v| format!("{v:.2} ms"));
            let flag = if e.violation.is_some() { "  VIOLATION" } else { "" };
            println!("  {:>16} -> {:<16} {got:>12} (slo {slo} ms){flag}", e.from, e.to.as_str());
        }
        for t in &r.thermal {
            println!(
                "  {} predicted {:.1} C on satellite (rec {:.0} C)",
                t.task.as_str(),
                t.predicted_c,
                t.temp_rec_c
            );
        }
        println!(
            "  E2E {:.2} ms, EO {:.2} ms\n",
            r.e2e_latency_ms.unwrap_or(f64::NAN),
            r.eo_latency_ms.unwrap_or(f64::NAN)
        );
    }
}
