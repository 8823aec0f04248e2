//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperdrive::harness::checks::{experiment_checks, CheckResult};
use hyperdrive::harness::{run_experiment, summarize, RunOptions, ScenarioConfig};
use hyperdrive::scheduler::{HyperDrive, Scheduler, SchedulingContext};
use hyperdrive::thermal::calc_score;
use hyperdrive::NodeId;

use common::*;

const MATRIX_BUDGET: Duration = Duration::from_secs(30 * 60);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);

fn check(id: u8, name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { id, name, passed, detail }
}

fn matrix() -> Vec<CheckResult> {
    let cfg = ScenarioConfig::wildfire();
    let started = Instant::now();
    let records = match run_experiment(&cfg, &RunOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            return (1..=5)
                .map(|id| check(id, "experiment matrix", false, format!("run failed: {e}")))
                .collect()
        }
    };
    let elapsed = started.elapsed();
    let summary = summarize(&records);
    let mut results = experiment_checks(&records, &summary);
    let first = &mut results[0];
    first.passed &= elapsed < MATRIX_BUDGET;
    first.detail += &format!("; {} cells in {:.1}s", records.len(), elapsed.as_secs_f64());
    results
}

fn pipeline_oracle() -> CheckResult {
    let started = Instant::now();
    let (mut agree, mut committed, mut disagreements) = (0, 0, Vec::new());
    const N: u64 = 1000;
    for seed in 0..N {
        let inst = random_instance(seed, 25);
        let orch = inst.orchestrator();
        let expected = oracle_choice(&inst, &orch);
        let mut hd = HyperDrive::new(exhaustive_config(), seed);
        let ctx = SchedulingContext {
            graph: &inst.graph,
            time_s: inst.time_s,
            thermal: &inst.env,
        };
        let mut dag = inst.dag.clone();
        let got = hd
            .schedule(&inst.target(), &mut dag, &ctx, &orch)
            .map(|d| d.chosen)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        committed += usize::from(got.is_some());
        if got == expected {
            agree += 1;
        } else if disagreements.len() < 3 {
            disagreements.push(format!("seed {seed}: got {got:?}, oracle {expected:?}"));
        }
    }
    let elapsed = started.elapsed();
    check(
        6,
        "Pipeline oracle equivalence",
        agree == N && elapsed < ORACLE_BUDGET,
        format!(
            "{agree}/{N} agree ({committed} committed, rest infeasible) in {:.2}s{}",
            elapsed.as_secs_f64(),
            if disagreements.is_empty() { String::new() } else { format!("; {}", disagreements.join("; ")) }
        ),
    )
}

fn path_oracle() -> CheckResult {
    let (mut pairs, mut bad) = (0usize, Vec::new());
    for seed in 0..500u64 {
        let mut r = rng(10_000 + seed);
        let n = rand::Rng::random_range(&mut r, 2..=8);
        let density = rand::Rng::random_range(&mut r, 0.2..0.9);
        let g = random_graph(&mut r, n, density);
        for u in 0..n {
            for v in 0..n {
                let (u, v) = (NodeId(u as u32), NodeId(v as u32));
                pairs += 1;
                let path = g.lowest_latency_path(u, v).unwrap();
                let expected = exhaustive_min_latency(&g, u, v);
                let ok = match (&path, expected) {
                    (None, None) => true,
                    (Some(p), Some(best)) => {
                        let links: Vec<_> = p.nodes.windows(2).map(|w| g.link_between(w[0], w[1]).unwrap()).collect();
                        let lat: f64 = links.iter().map(|l| l.latency_ms).sum();
                        let bw = links.iter().map(|l| l.bandwidth_bps).fold(f64::INFINITY, f64::min);
                        let drop = 1.0 - links.iter().map(|l| 1.0 - l.packet_drop).product::<f64>();
                        let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
                        p.qos.latency_ms == best && close(lat, best) && close(p.qos.bandwidth_bps, bw) && close(p.qos.packet_drop, drop)
                    }
                    _ => false,
                };
                if !ok && bad.len() < 3 {
                    bad.push(format!("graph {seed} {u}->{v}: {:?} vs {expected:?}", path.map(|p| p.qos)));
                }
            }
        }
    }
    check(
        7,
        "Path oracle",
        bad.is_empty(),
        if bad.is_empty() {
            format!("500 graphs, {pairs} node pairs match exhaustive search and QoS formulas")
        } else {
            bad.join("; ")
        },
    )
}

fn calc_score_conformance() -> CheckResult {
    let cases = [((70.0, 75.0, 85.0), 100), ((86.0, 75.0, 85.0), 0), ((80.0, 75.0, 85.0), 50)];
    let mut failures = Vec::new();
    for ((e, r, m), want) in cases {
        let got = calc_score(e, r, m).unwrap();
        if got != want {
            failures.push(format!("({e},{r},{m}) -> {got}, want {want}"));
        }
    }
    let mut prev = u32::MAX;
    for i in 0..1000 {
        let t = 60.0 + 35.0 * i as f64 / 999.0;
        let s = calc_score(t, 75.0, 85.0).unwrap();
        if s > prev {
            failures.push(format!("score rises at {t:.3}: {prev} -> {s}"));
            break;
        }
        prev = s;
    }
    check(
        8,
        "Temperature score conformance",
        failures.is_empty(),
        if failures.is_empty() {
            "3 branch cases exact; non-increasing over 1000-point sweep 60..95".into()
        } else {
            failures.join("; ")
        },
    )
}

fn commit_safety() -> CheckResult {
    let mut detail = Vec::new();
    let mut passed = true;
    for (label, p) in [("no conflicts", 0.0), ("30% injected conflicts", 0.3)] {
        match stress_orchestrator(42, 4, 2500, p) {
            Ok(s) => detail.push(format!(
                "{label}: 4x2500 ops, {} commits, {} conflicts, audit ok",
                s.committed, s.conflicts
            )),
            Err(e) => {
                passed = false;
                detail.push(format!("{label}: {e}"));
            }
        }
    }
    let mut multi_total = 0;
    let mut single_total = 0;
    for seed in 1..=5 {
        let multi = reschedule_events(3, seed, 0.3, 200);
        let single = reschedule_events(1, seed, 0.3, 200);
        passed &= multi <= single;
        multi_total += multi;
        single_total += single;
    }
    detail.push(format!("reschedules multi={multi_total} single={single_total} over 5 seeds"));
    check(9, "Commit safety", passed, detail.join("; "))
}

fn main() -> ExitCode {
    let mut results = matrix();
    results.push(pipeline_oracle());
    results.push(path_oracle());
    results.push(calc_score_conformance());
    results.push(commit_safety());
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
